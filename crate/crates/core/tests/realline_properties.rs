//! Interval algebra and real-line semantics, checked by point sampling.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use itl_core::corpus::Corpus;
use itl_core::formula::{named, Formula};
use itl_core::realline::random::{interval_set, open_set, piecewise_map};
use itl_core::realline::{eval_real, q, Caps, IntervalSet, Rational, RealSystem};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every endpoint, the midpoints between consecutive ones, and points
/// beyond both ends: membership is constant between these.
fn probes(sets: &[&IntervalSet], extra: &[Rational]) -> Vec<Rational> {
    let mut ends: Vec<Rational> = sets.iter().flat_map(|s| s.endpoints()).chain(extra.iter().cloned()).collect();
    ends.sort();
    ends.dedup();
    let mut out = ends.clone();
    for w in ends.windows(2) {
        out.push((&w[0] + &w[1]) / q(2, 1));
    }
    match (ends.first(), ends.last()) {
        (Some(a), Some(b)) => out.extend([a - q(1, 1), b + q(1, 1)]),
        _ => out.push(q(0, 1)),
    }
    out
}

fn random_system(rng: &mut ChaCha8Rng) -> RealSystem {
    let map = piecewise_map(rng, 3);
    let val: BTreeMap<String, IntervalSet> = ["p", "q"].iter().map(|a| (a.to_string(), open_set(rng, 3))).collect();
    RealSystem::new(map, val, Caps::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn boolean_operations_are_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (interval_set(&mut r, 4), interval_set(&mut r, 4));
        let (u, i, c, d) = (a.union(&b), a.intersect(&b), a.complement(), a.difference(&b));
        for s in [&a, &b, &u, &i, &c, &d] {
            prop_assert!(s.is_canonical(), "{}", s);
        }
        for x in probes(&[&a, &b], &[]) {
            let (ina, inb) = (a.contains(&x), b.contains(&x));
            prop_assert_eq!(u.contains(&x), ina || inb);
            prop_assert_eq!(i.contains(&x), ina && inb);
            prop_assert_eq!(c.contains(&x), !ina);
            prop_assert_eq!(d.contains(&x), ina && !inb);
        }
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
        prop_assert_eq!(a.intersect(&b).complement(), a.complement().union(&b.complement()));
        prop_assert_eq!(c.complement(), a.clone());
        prop_assert_eq!(i.is_subset(&a), true);
        prop_assert_eq!(a.is_subset(&u), true);
    }

    #[test]
    fn interior_and_closure_are_dual(seed in any::<u64>()) {
        let a = interval_set(&mut rng(seed), 4);
        let (int, cl) = (a.interior(), a.closure());
        prop_assert!(int.is_open());
        prop_assert!(int.is_subset(&a) && a.is_subset(&cl));
        prop_assert_eq!(int.complement(), a.complement().closure());
        prop_assert_eq!(cl.complement(), a.complement().interior());
        prop_assert_eq!(int.interior(), int.clone());
        prop_assert_eq!(cl.closure(), cl.clone());
        // a point is interior iff a small neighbourhood stays inside
        let eps = q(1, 1000);
        for x in probes(&[&a], &[]) {
            let inside = [&x - &eps, x.clone(), &x + &eps].iter().all(|y| a.contains(y));
            prop_assert_eq!(int.contains(&x), inside, "x = {}", x);
        }
    }

    #[test]
    fn preimage_and_image_are_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let map = piecewise_map(&mut r, 3);
        let a = interval_set(&mut r, 3);
        let pre = map.preimage(&a);
        prop_assert!(pre.is_canonical());
        for x in probes(&[&pre], map.breakpoints()) {
            prop_assert_eq!(pre.contains(&x), a.contains(&map.apply(&x)), "x = {} under {}", x, map);
        }
        let img = map.image(&a);
        for x in probes(&[&a], map.breakpoints()) {
            if a.contains(&x) {
                prop_assert!(img.contains(&map.apply(&x)), "f({}) missing from {}", x, img);
            }
        }
        if map.is_open() {
            prop_assert!(map.image(&a.interior()).is_open());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tense_clauses_hold_pointwise(seed in any::<u64>()) {
        let sys = random_system(&mut rng(seed));
        let p = Formula::atom("p");
        let vp = sys.atom("p");
        let next = eval_real(&sys, &Formula::next(p.clone()));
        prop_assert!(next.status.is_determined());
        for x in probes(&[&next.value, &vp], sys.map.breakpoints()) {
            prop_assert_eq!(next.value.contains(&x), vp.contains(&sys.map.apply(&x)));
        }
        let strong = eval_real(&sys, &Formula::strong_box(p.clone()));
        let weak = eval_real(&sys, &Formula::weak_box(p.clone()));
        let dia = eval_real(&sys, &Formula::eventually(p.clone()));
        for out in [&strong, &weak, &dia] {
            if out.status.is_determined() {
                prop_assert!(out.value.is_open(), "{}", out.value);
            }
        }
        if strong.status.is_determined() {
            prop_assert!(strong.value.is_subset(&vp));
            // every point of []p keeps its orbit inside p for a while
            for x in probes(&[&strong.value], &[]) {
                if strong.value.contains(&x) {
                    let mut y = x.clone();
                    for _ in 0..16 {
                        prop_assert!(vp.contains(&y), "orbit of {} leaves p at {}", x, y);
                        y = sys.map.apply(&y);
                    }
                }
            }
        }
        if weak.status.is_determined() {
            prop_assert!(weak.value.is_subset(&vp));
        }
        if strong.status.is_determined() && weak.status.is_determined() {
            prop_assert!(strong.value.is_subset(&weak.value), "[]p = {} but [*]p = {}", strong.value, weak.value);
        }
        if dia.status.is_determined() {
            prop_assert!(vp.is_subset(&dia.value));
            // a point reaching p within 16 steps lies in <>p
            for x in probes(&[&dia.value, &vp], &[]) {
                let mut y = x.clone();
                let mut hit = false;
                for _ in 0..16 {
                    hit |= vp.contains(&y);
                    y = sys.map.apply(&y);
                }
                if hit {
                    prop_assert!(dia.value.contains(&x), "{} reaches p but is outside {}", x, dia.value);
                }
            }
        }
    }
}

#[test]
fn conditional_excluded_middle_on_bundled_systems() {
    let corpus = Corpus::open_default().unwrap();
    let cem = named::cem(&Formula::atom("p"), &Formula::atom("q"));
    let mut r = rng(20);
    for id in ["r-double", "r-kinked"] {
        let base = corpus.real_system(id).unwrap();
        for _ in 0..20 {
            let val = ["p", "q"].iter().map(|a| (a.to_string(), open_set(&mut r, 3))).collect();
            let sys = base.with_valuation(val).unwrap();
            let out = eval_real(&sys, &cem);
            assert!(out.status.is_determined(), "{id}: {}", out.status);
            assert!(out.value.is_everything(), "{id}: {} with p = {}, q = {}", out.value, sys.atom("p"), sys.atom("q"));
        }
    }
}

/// Keeps the pointwise property above from passing vacuously.
#[test]
fn most_random_systems_are_decided() {
    let p = Formula::atom("p");
    let mut decided = [0usize; 3];
    for seed in 0..200 {
        let sys = random_system(&mut rng(seed));
        for (i, f) in [Formula::strong_box(p.clone()), Formula::weak_box(p.clone()), Formula::eventually(p.clone())]
            .iter()
            .enumerate()
        {
            decided[i] += eval_real(&sys, f).status.is_determined() as usize;
        }
    }
    assert!(decided.iter().all(|&d| d >= 100), "decided out of 200: {decided:?}");
}
