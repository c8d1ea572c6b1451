//! Seeded generators of interval sets and rational points, shared by the
//! property tests and the acceptance suite.

use rand::Rng;

use super::interval::{Interval, IntervalSet, Lower, Upper};
use super::map::{Affine, PiecewiseAffineMap};
use super::{q, Rational};

/// A rational `k / 4` with `|k| <= 4 * span`.
pub fn grid_point<R: Rng>(rng: &mut R, span: i64) -> Rational {
    q(rng.gen_range(-4 * span..=4 * span), 4)
}

/// A rational with a small random denominator.
pub fn fine_point<R: Rng>(rng: &mut R, span: i64) -> Rational {
    let d = rng.gen_range(1..=12);
    q(rng.gen_range(-span * d..=span * d), d)
}

/// Up to `max_parts` intervals with grid ends, random inclusion flags and
/// occasional unbounded ends or singletons.
pub fn interval_set<R: Rng>(rng: &mut R, max_parts: usize) -> IntervalSet {
    let parts = rng.gen_range(0..=max_parts);
    let mut items = Vec::new();
    for _ in 0..parts {
        let a = grid_point(rng, 3);
        let b = grid_point(rng, 3);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if rng.gen_bool(0.1) {
            items.push(Interval::point(a));
            continue;
        }
        let lower = match rng.gen_range(0..8) {
            0 => Lower::Unbounded,
            1..=3 => Lower::Closed(a),
            _ => Lower::Open(a),
        };
        let upper = match rng.gen_range(0..8) {
            0 => Upper::Unbounded,
            1..=3 => Upper::Closed(b),
            _ => Upper::Open(b),
        };
        items.extend(Interval::new(lower, upper));
    }
    IntervalSet::from_intervals(items)
}

/// A random open set: up to `max_parts` open intervals, possibly unbounded.
pub fn open_set<R: Rng>(rng: &mut R, max_parts: usize) -> IntervalSet {
    interval_set(rng, max_parts).interior()
}

/// A continuous piecewise-affine map with up to `max_breaks` grid
/// breakpoints, grid values there and half-integer outer slopes.
pub fn piecewise_map<R: Rng>(rng: &mut R, max_breaks: usize) -> PiecewiseAffineMap {
    let slope = |rng: &mut R| q(rng.gen_range(-4..=4), 2);
    let k = rng.gen_range(0..=max_breaks);
    if k == 0 {
        let s = slope(rng);
        return PiecewiseAffineMap::affine(Affine::new(s, grid_point(rng, 2)));
    }
    let mut bs: Vec<Rational> = (0..k).map(|_| grid_point(rng, 3)).collect();
    bs.sort();
    bs.dedup();
    let vs: Vec<Rational> = bs.iter().map(|_| grid_point(rng, 3)).collect();
    let through = |s: Rational, x: &Rational, y: &Rational| Affine::new(s.clone(), y - &s * x);
    let mut pieces = vec![through(slope(rng), &bs[0], &vs[0])];
    for i in 0..bs.len() - 1 {
        let s = (&vs[i + 1] - &vs[i]) / (&bs[i + 1] - &bs[i]);
        pieces.push(through(s, &bs[i], &vs[i]));
    }
    pieces.push(through(slope(rng), bs.last().unwrap(), vs.last().unwrap()));
    PiecewiseAffineMap::new(bs, pieces).expect("pieces agree at the breakpoints")
}
