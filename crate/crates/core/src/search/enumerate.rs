use std::collections::BTreeMap;

use crate::poset::{DynamicPoset, PosetModel, WorldSet};

use super::{ClassKind, SearchError, SemanticClass};

/// Every labeled partial order on `n` worlds, as the principal up-set of
/// each world. Pairs `i < j` are assigned one of incomparable, `i <= j` or
/// `j <= i`, counted in base 3 with the first pair varying slowest; the
/// transitive assignments are kept.
pub fn partial_orders(n: usize) -> Vec<Vec<WorldSet>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    let mut digits = vec![0u8; pairs.len()];
    for code in 0..total {
        let mut c = code;
        for d in digits.iter_mut().rev() {
            *d = (c % 3) as u8;
            c /= 3;
        }
        let mut up: Vec<WorldSet> = (0..n).map(WorldSet::singleton).collect();
        for (&(i, j), &d) in pairs.iter().zip(&digits) {
            match d {
                1 => up[i] = up[i].with(j),
                2 => up[j] = up[j].with(i),
                _ => {}
            }
        }
        let transitive = (0..n).all(|a| up[a].iter().all(|b| up[b].is_subset(up[a])));
        if transitive {
            out.push(up);
        }
    }
    out
}

/// Every order-preserving self-map of the order given by `up`, in
/// lexicographic order of the image tuple.
pub fn monotone_maps(up: &[WorldSet]) -> Vec<Vec<usize>> {
    fn extend(up: &[WorldSet], map: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = up.len();
        let w = map.len();
        if w == n {
            out.push(map.clone());
            return;
        }
        for target in 0..n {
            let fits = (0..w).all(|a| {
                (!up[a].contains(w) || up[map[a]].contains(target))
                    && (!up[w].contains(a) || up[target].contains(map[a]))
            });
            if fits {
                map.push(target);
                extend(up, map, out);
                map.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(up, &mut Vec::with_capacity(up.len()), &mut out);
    out
}

/// Frames of `class` on exactly `n` worlds, in enumeration order.
pub fn frames_of_size(kind: ClassKind, n: usize) -> Vec<DynamicPoset> {
    let mut out = Vec::new();
    for up in partial_orders(n) {
        out.extend(frames_over(kind, &up));
    }
    out
}

/// Frames of `kind` over one fixed order.
pub(crate) fn frames_over(kind: ClassKind, up: &[WorldSet]) -> Vec<DynamicPoset> {
    let names = DynamicPoset::default_names(up.len());
    monotone_maps(up)
        .into_iter()
        .map(|step| DynamicPoset::from_up_sets(names.clone(), up.to_vec(), step))
        .filter(|f| kind == ClassKind::Expanding || f.is_open())
        .collect()
}

/// Every frame of `class`, smallest carriers first.
pub fn frames(class: SemanticClass) -> Result<impl Iterator<Item = DynamicPoset>, SearchError> {
    class.check()?;
    Ok((1..=class.bound).flat_map(move |n| frames_of_size(class.kind, n)))
}

/// Every assignment of up-sets to `k` atoms, as value tuples.
pub fn valuations(frame: &DynamicPoset, k: usize) -> impl Iterator<Item = Vec<WorldSet>> {
    let ups = frame.up_sets();
    let m = ups.len();
    let total = m.checked_pow(k as u32).expect("valuation count overflows");
    (0..total).map(move |mut code| {
        let mut vals = vec![WorldSet::EMPTY; k];
        for v in vals.iter_mut().rev() {
            *v = ups[code % m];
            code /= m;
        }
        vals
    })
}

/// The model with frame `frame` and `atoms[i]` true on `values[i]`.
pub fn model_from(frame: &DynamicPoset, atoms: &[&str], values: &[WorldSet]) -> PosetModel {
    let assignment: BTreeMap<String, WorldSet> =
        atoms.iter().map(|a| a.to_string()).zip(values.iter().copied()).collect();
    PosetModel::new(frame.clone(), assignment).expect("enumerated values are up-sets")
}

/// Streams every model of `class` valuating exactly `atoms`, smallest
/// carriers first.
pub fn enumerate_models<'a>(
    class: SemanticClass,
    atoms: &'a [&'a str],
) -> Result<impl Iterator<Item = PosetModel> + 'a, SearchError> {
    let fs = frames(class)?;
    Ok(fs.flat_map(move |frame| {
        let vals: Vec<Vec<WorldSet>> = valuations(&frame, atoms.len()).collect();
        vals.into_iter().map(move |v| model_from(&frame, atoms, &v))
    }))
}

/// Number of models [`enumerate_models`] yields, without building them.
pub fn count_models(class: SemanticClass, atoms: usize) -> Result<u128, SearchError> {
    Ok(frames(class)?.map(|f| (f.up_sets().len() as u128).pow(atoms as u32)).sum())
}

/// Isomorphism-invariant key of a model: the least encoding over all
/// relabelings of the worlds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub worlds: usize,
    pub order: Vec<u64>,
    pub step: Vec<usize>,
    pub valuation: Vec<(String, u64)>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Canonical form by brute force over relabelings; meant for the small
/// carriers the search handles.
pub fn canonical_form(model: &PosetModel) -> CanonicalForm {
    let frame = &model.frame;
    let n = frame.len();
    let relabel = |set: WorldSet, perm: &[usize]| WorldSet::from_worlds(set.iter().map(|w| perm[w])).0;
    let mut best: Option<CanonicalForm> = None;
    for perm in permutations(n) {
        let mut inverse = vec![0; n];
        for (w, &p) in perm.iter().enumerate() {
            inverse[p] = w;
        }
        let order = (0..n).map(|p| relabel(frame.up(inverse[p]), &perm)).collect();
        let step = (0..n).map(|p| perm[frame.step(inverse[p])]).collect();
        let valuation = model.valuation.iter().map(|(a, s)| (a.clone(), relabel(s.set(), &perm))).collect();
        let form = CanonicalForm { worlds: n, order, step, valuation };
        if best.as_ref().is_none_or(|b| form < *b) {
            best = Some(form);
        }
    }
    best.expect("at least one permutation")
}

/// Whether two models are isomorphic.
pub fn isomorphic(a: &PosetModel, b: &PosetModel) -> bool {
    a.frame.len() == b.frame.len() && canonical_form(a) == canonical_form(b)
}
