use std::cmp::Ordering;
use std::fmt;

use super::{fmt_rational, Rational};

/// Lower end of an interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Lower {
    Unbounded,
    Closed(Rational),
    Open(Rational),
}

/// Upper end of an interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Upper {
    Unbounded,
    Closed(Rational),
    Open(Rational),
}

impl Lower {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Lower::Unbounded => None,
            Lower::Closed(v) | Lower::Open(v) => Some(v),
        }
    }

    fn admits(&self, x: &Rational) -> bool {
        match self {
            Lower::Unbounded => true,
            Lower::Closed(v) => x >= v,
            Lower::Open(v) => x > v,
        }
    }

    /// Order of lower ends by the sets they bound: smaller means more is
    /// admitted.
    fn cmp_lower(&self, other: &Lower) -> Ordering {
        match (self, other) {
            (Lower::Unbounded, Lower::Unbounded) => Ordering::Equal,
            (Lower::Unbounded, _) => Ordering::Less,
            (_, Lower::Unbounded) => Ordering::Greater,
            (a, b) => {
                let (va, vb) = (a.value().unwrap(), b.value().unwrap());
                va.cmp(vb).then_with(|| match (a, b) {
                    (Lower::Closed(_), Lower::Open(_)) => Ordering::Less,
                    (Lower::Open(_), Lower::Closed(_)) => Ordering::Greater,
                    _ => Ordering::Equal,
                })
            }
        }
    }

    /// The upper end of the complementary ray below this bound.
    fn complement(&self) -> Option<Upper> {
        match self {
            Lower::Unbounded => None,
            Lower::Closed(v) => Some(Upper::Open(v.clone())),
            Lower::Open(v) => Some(Upper::Closed(v.clone())),
        }
    }
}

impl Upper {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Upper::Unbounded => None,
            Upper::Closed(v) | Upper::Open(v) => Some(v),
        }
    }

    fn admits(&self, x: &Rational) -> bool {
        match self {
            Upper::Unbounded => true,
            Upper::Closed(v) => x <= v,
            Upper::Open(v) => x < v,
        }
    }

    /// Larger means more is admitted.
    fn cmp_upper(&self, other: &Upper) -> Ordering {
        match (self, other) {
            (Upper::Unbounded, Upper::Unbounded) => Ordering::Equal,
            (Upper::Unbounded, _) => Ordering::Greater,
            (_, Upper::Unbounded) => Ordering::Less,
            (a, b) => {
                let (va, vb) = (a.value().unwrap(), b.value().unwrap());
                va.cmp(vb).then_with(|| match (a, b) {
                    (Upper::Closed(_), Upper::Open(_)) => Ordering::Greater,
                    (Upper::Open(_), Upper::Closed(_)) => Ordering::Less,
                    _ => Ordering::Equal,
                })
            }
        }
    }

    fn complement(&self) -> Option<Lower> {
        match self {
            Upper::Unbounded => None,
            Upper::Closed(v) => Some(Lower::Open(v.clone())),
            Upper::Open(v) => Some(Lower::Closed(v.clone())),
        }
    }

    /// True if an interval ending here and one starting at `next` overlap
    /// or touch, so that their union is an interval.
    fn meets(&self, next: &Lower) -> bool {
        match (self, next) {
            (Upper::Unbounded, _) | (_, Lower::Unbounded) => true,
            (u, l) => {
                let (vu, vl) = (u.value().unwrap(), l.value().unwrap());
                match vl.cmp(vu) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => matches!(u, Upper::Closed(_)) || matches!(l, Lower::Closed(_)),
                }
            }
        }
    }
}

/// A nonempty interval of the real line with rational ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: Lower,
    pub upper: Upper,
}

impl Interval {
    /// `None` if the bounds describe the empty set.
    pub fn new(lower: Lower, upper: Upper) -> Option<Self> {
        let empty = match (lower.value(), upper.value()) {
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Greater => true,
                Ordering::Equal => !(matches!(lower, Lower::Closed(_)) && matches!(upper, Upper::Closed(_))),
                Ordering::Less => false,
            },
            _ => false,
        };
        (!empty).then_some(Interval { lower, upper })
    }

    pub fn everything() -> Self {
        Interval { lower: Lower::Unbounded, upper: Upper::Unbounded }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lower: Lower::Closed(x.clone()), upper: Upper::Closed(x) }
    }

    pub fn open(a: Rational, b: Rational) -> Option<Self> {
        Self::new(Lower::Open(a), Upper::Open(b))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lower.admits(x) && self.upper.admits(x)
    }

    pub fn is_open(&self) -> bool {
        !matches!(self.lower, Lower::Closed(_)) && !matches!(self.upper, Upper::Closed(_))
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lower =
            if self.lower.cmp_lower(&other.lower) == Ordering::Less { other.lower.clone() } else { self.lower.clone() };
        let upper = if self.upper.cmp_upper(&other.upper) == Ordering::Greater {
            other.upper.clone()
        } else {
            self.upper.clone()
        };
        Interval::new(lower, upper)
    }

    fn interior(&self) -> Option<Interval> {
        let lower = match &self.lower {
            Lower::Closed(v) => Lower::Open(v.clone()),
            l => l.clone(),
        };
        let upper = match &self.upper {
            Upper::Closed(v) => Upper::Open(v.clone()),
            u => u.clone(),
        };
        Interval::new(lower, upper)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lower {
            Lower::Unbounded => write!(f, "(-inf, ")?,
            Lower::Closed(v) => write!(f, "[{}, ", fmt_rational(v))?,
            Lower::Open(v) => write!(f, "({}, ", fmt_rational(v))?,
        }
        match &self.upper {
            Upper::Unbounded => write!(f, "inf)"),
            Upper::Closed(v) => write!(f, "{}]", fmt_rational(v)),
            Upper::Open(v) => write!(f, "{})", fmt_rational(v)),
        }
    }
}

/// A finite union of intervals in canonical form: components are sorted,
/// pairwise disjoint and not adjacent, so equal sets have equal
/// representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    components: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { components: Vec::new() }
    }

    pub fn everything() -> Self {
        IntervalSet { components: vec![Interval::everything()] }
    }

    pub fn from_interval(i: Interval) -> Self {
        IntervalSet { components: vec![i] }
    }

    /// Normalizes an arbitrary list of intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        let mut items: Vec<Interval> = items.into_iter().collect();
        items.sort_by(|a, b| a.lower.cmp_lower(&b.lower).then_with(|| a.upper.cmp_upper(&b.upper)));
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for it in items {
            if let Some(last) = out.last_mut() {
                if last.upper.meets(&it.lower) {
                    if it.upper.cmp_upper(&last.upper) == Ordering::Greater {
                        last.upper = it.upper;
                    }
                    continue;
                }
            }
            out.push(it);
        }
        IntervalSet { components: out }
    }

    /// `(a, b)`, or empty when `a >= b`.
    pub fn open_interval(a: Rational, b: Rational) -> Self {
        Self::from_intervals(Interval::open(a, b))
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_everything(&self) -> bool {
        self.components.len() == 1 && self.components[0] == Interval::everything()
    }

    /// True if the representation is already canonical.
    pub fn is_canonical(&self) -> bool {
        self.components
            .windows(2)
            .all(|w| w[0].lower.cmp_lower(&w[1].lower) == Ordering::Less && !w[0].upper.meets(&w[1].lower))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.components.iter().any(|c| c.contains(x))
    }

    pub fn is_open(&self) -> bool {
        self.components.iter().all(Interval::is_open)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.union(other) == *other
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.components.iter().chain(other.components.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.components.len() && j < other.components.len() {
            let a = &self.components[i];
            let b = &other.components[j];
            if let Some(c) = a.intersect(b) {
                out.push(c);
            }
            if a.upper.cmp_upper(&b.upper) == Ordering::Less {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut from = Some(Lower::Unbounded);
        for c in &self.components {
            if let (Some(lo), Some(hi)) = (from.clone(), c.lower.complement()) {
                out.extend(Interval::new(lo, hi));
            }
            from = c.upper.complement();
        }
        if let Some(lo) = from {
            out.extend(Interval::new(lo, Upper::Unbounded));
        }
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    /// Opens every closed finite end and drops singletons.
    pub fn interior(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.components.iter().filter_map(Interval::interior))
    }

    pub fn closure(&self) -> IntervalSet {
        self.complement().interior().complement()
    }

    /// Finite end points, sorted and deduplicated.
    pub fn endpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for c in &self.components {
            out.extend(c.lower.value().cloned());
            out.extend(c.upper.value().cloned());
        }
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("empty");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realline::q;

    fn ray_le(v: i64) -> IntervalSet {
        IntervalSet::from_interval(Interval::new(Lower::Unbounded, Upper::Closed(q(v, 1))).unwrap())
    }

    #[test]
    fn interior_of_closed_ray() {
        let open = IntervalSet::from_interval(Interval::new(Lower::Unbounded, Upper::Open(q(0, 1))).unwrap());
        assert_eq!(ray_le(0).interior(), open);
    }

    #[test]
    fn singleton_has_empty_interior() {
        let s = IntervalSet::from_interval(Interval::point(q(3, 2)));
        assert!(s.interior().is_empty());
        assert!(s.interior().closure().is_empty());
        assert_eq!(s.closure(), s);
    }

    #[test]
    fn complement_of_unit_interval() {
        let s = IntervalSet::open_interval(q(0, 1), q(1, 1));
        let c = s.complement();
        assert_eq!(c.to_string(), "(-inf, 0] u [1, inf)");
        assert_eq!(c.complement(), s);
    }

    #[test]
    fn adjacent_pieces_merge() {
        let a = Interval::new(Lower::Open(q(0, 1)), Upper::Closed(q(1, 1))).unwrap();
        let b = Interval::new(Lower::Open(q(1, 1)), Upper::Open(q(2, 1))).unwrap();
        let s = IntervalSet::from_intervals([b, a]);
        assert_eq!(s, IntervalSet::open_interval(q(0, 1), q(2, 1)));
        let c = Interval::open(q(0, 1), q(1, 1)).unwrap();
        let d = Interval::open(q(1, 1), q(2, 1)).unwrap();
        assert_eq!(IntervalSet::from_intervals([c, d]).components().len(), 2);
    }

    #[test]
    fn intersection_and_membership() {
        let a = IntervalSet::open_interval(q(0, 1), q(2, 1)).union(&IntervalSet::open_interval(q(3, 1), q(5, 1)));
        let b = IntervalSet::open_interval(q(1, 1), q(4, 1));
        let c = a.intersect(&b);
        assert_eq!(c.to_string(), "(1, 2) u (3, 4)");
        assert!(c.contains(&q(7, 2)));
        assert!(!c.contains(&q(2, 1)));
        assert!(IntervalSet::everything().complement().is_empty());
        assert!(IntervalSet::empty().complement().is_everything());
    }

    #[test]
    fn empty_bounds_are_rejected() {
        assert!(Interval::new(Lower::Open(q(1, 1)), Upper::Closed(q(1, 1))).is_none());
        assert!(Interval::new(Lower::Closed(q(2, 1)), Upper::Closed(q(1, 1))).is_none());
        assert!(Interval::new(Lower::Closed(q(1, 1)), Upper::Closed(q(1, 1))).is_some());
    }
}
