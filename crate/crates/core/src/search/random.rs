use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::poset::{DynamicPoset, PosetModel, WorldSet};

use super::ClassKind;

/// A random partial order on `n` worlds: a random linear order thinned to
/// a DAG, then transitively closed.
pub fn random_order<R: Rng>(rng: &mut R, n: usize) -> Vec<WorldSet> {
    let mut linear: Vec<usize> = (0..n).collect();
    linear.shuffle(rng);
    let density: f64 = rng.gen_range(0.0..0.7);
    let mut up: Vec<WorldSet> = (0..n).map(WorldSet::singleton).collect();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                up[linear[i]] = up[linear[i]].with(linear[j]);
            }
        }
    }
    // closure, walking the linear order from the top
    for &a in linear.iter().rev() {
        let mut acc = up[a];
        for b in up[a].iter() {
            acc = acc.union(up[b]);
        }
        up[a] = acc;
    }
    up
}

/// A random order-preserving map, by backtracking over shuffled targets.
pub fn random_monotone_map<R: Rng>(rng: &mut R, up: &[WorldSet]) -> Vec<usize> {
    fn extend<R: Rng>(rng: &mut R, up: &[WorldSet], map: &mut Vec<usize>) -> bool {
        let n = up.len();
        let w = map.len();
        if w == n {
            return true;
        }
        let mut targets: Vec<usize> = (0..n).collect();
        targets.shuffle(rng);
        for t in targets {
            let fits = (0..w).all(|a| {
                (!up[a].contains(w) || up[map[a]].contains(t)) && (!up[w].contains(a) || up[t].contains(map[a]))
            });
            if fits {
                map.push(t);
                if extend(rng, up, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    let mut map = Vec::with_capacity(up.len());
    // constant maps are monotone, so the search always succeeds
    let ok = extend(rng, up, &mut map);
    debug_assert!(ok);
    map
}

/// A random up-set: the upward closure of a random subset.
pub fn random_up_set<R: Rng>(rng: &mut R, frame: &DynamicPoset) -> WorldSet {
    let density: f64 = rng.gen_range(0.0..0.6);
    let seed = WorldSet::from_worlds((0..frame.len()).filter(|_| rng.gen_bool(density)));
    frame.up_closure(seed)
}

/// A random frame on 1..=`max_worlds` worlds. For the persistent class,
/// draws are repeated until the map is open; the identity is the fallback.
pub fn random_frame<R: Rng>(rng: &mut R, max_worlds: usize, kind: ClassKind) -> DynamicPoset {
    let n = rng.gen_range(1..=max_worlds);
    let names = DynamicPoset::default_names(n);
    for _ in 0..64 {
        let up = random_order(rng, n);
        let step = random_monotone_map(rng, &up);
        let frame = DynamicPoset::from_up_sets(names.clone(), up, step);
        if kind == ClassKind::Expanding || frame.is_open() {
            return frame;
        }
    }
    let up = random_order(rng, n);
    DynamicPoset::from_up_sets(names, up, (0..n).collect())
}

/// A random model of `kind` valuating `atoms`.
pub fn random_model<R: Rng>(rng: &mut R, max_worlds: usize, kind: ClassKind, atoms: &[&str]) -> PosetModel {
    let frame = random_frame(rng, max_worlds, kind);
    let assignment: BTreeMap<String, WorldSet> =
        atoms.iter().map(|a| (a.to_string(), random_up_set(rng, &frame))).collect();
    PosetModel::new(frame, assignment).expect("random values are up-sets")
}
