use std::fmt;

use num::{Signed, Zero};

use super::interval::{Interval, IntervalSet, Lower, Upper};
use super::{fmt_rational, Rational, RealError};

/// `x -> slope * x + intercept`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Self { slope, intercept }
    }

    pub fn constant(c: Rational) -> Self {
        Self { slope: Rational::zero(), intercept: c }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// Solution of `apply(x) = y`; `None` for constant pieces.
    pub fn solve(&self, y: &Rational) -> Option<Rational> {
        (!self.slope.is_zero()).then(|| (y - &self.intercept) / &self.slope)
    }

    /// Preimage of an interval under the affine function on all of the line.
    fn preimage(&self, i: &Interval) -> IntervalSet {
        if self.slope.is_zero() {
            return if i.contains(&self.intercept) { IntervalSet::everything() } else { IntervalSet::empty() };
        }
        let solve = |v: &Rational| self.solve(v).unwrap();
        let (lower, upper) = if self.slope.is_positive() {
            let lower = match &i.lower {
                Lower::Unbounded => Lower::Unbounded,
                Lower::Closed(v) => Lower::Closed(solve(v)),
                Lower::Open(v) => Lower::Open(solve(v)),
            };
            let upper = match &i.upper {
                Upper::Unbounded => Upper::Unbounded,
                Upper::Closed(v) => Upper::Closed(solve(v)),
                Upper::Open(v) => Upper::Open(solve(v)),
            };
            (lower, upper)
        } else {
            let lower = match &i.upper {
                Upper::Unbounded => Lower::Unbounded,
                Upper::Closed(v) => Lower::Closed(solve(v)),
                Upper::Open(v) => Lower::Open(solve(v)),
            };
            let upper = match &i.lower {
                Lower::Unbounded => Upper::Unbounded,
                Lower::Closed(v) => Upper::Closed(solve(v)),
                Lower::Open(v) => Upper::Open(solve(v)),
            };
            (lower, upper)
        };
        IntervalSet::from_intervals(Interval::new(lower, upper))
    }

    /// Image of an interval.
    fn image(&self, i: &Interval) -> Interval {
        if self.slope.is_zero() {
            return Interval::point(self.intercept.clone());
        }
        let f = |v: &Rational| self.apply(v);
        let (lower, upper) = if self.slope.is_positive() {
            let lower = match &i.lower {
                Lower::Unbounded => Lower::Unbounded,
                Lower::Closed(v) => Lower::Closed(f(v)),
                Lower::Open(v) => Lower::Open(f(v)),
            };
            let upper = match &i.upper {
                Upper::Unbounded => Upper::Unbounded,
                Upper::Closed(v) => Upper::Closed(f(v)),
                Upper::Open(v) => Upper::Open(f(v)),
            };
            (lower, upper)
        } else {
            let lower = match &i.upper {
                Upper::Unbounded => Lower::Unbounded,
                Upper::Closed(v) => Lower::Closed(f(v)),
                Upper::Open(v) => Lower::Open(f(v)),
            };
            let upper = match &i.lower {
                Lower::Unbounded => Upper::Unbounded,
                Lower::Closed(v) => Upper::Closed(f(v)),
                Lower::Open(v) => Upper::Open(f(v)),
            };
            (lower, upper)
        };
        Interval::new(lower, upper).expect("image of a nonempty interval is nonempty")
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = Rational::from_integer(1.into());
        let linear = if self.slope.is_zero() {
            None
        } else if self.slope == one {
            Some("x".to_string())
        } else if self.slope == -one {
            Some("-x".to_string())
        } else {
            Some(format!("{}*x", fmt_rational(&self.slope)))
        };
        match linear {
            None => f.write_str(&fmt_rational(&self.intercept)),
            Some(l) if self.intercept.is_zero() => f.write_str(&l),
            Some(l) if self.intercept.is_negative() => write!(f, "{l} - {}", fmt_rational(&-&self.intercept)),
            Some(l) => write!(f, "{l} + {}", fmt_rational(&self.intercept)),
        }
    }
}

/// A continuous map of the real line that is affine on each of the closed
/// pieces `(-inf, b1], [b1, b2], ..., [bk, inf)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseAffineMap {
    breakpoints: Vec<Rational>,
    pieces: Vec<Affine>,
}

impl PiecewiseAffineMap {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Affine>) -> Result<Self, RealError> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(RealError::PieceCount { breakpoints: breakpoints.len(), pieces: pieces.len() });
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(RealError::BreakpointsNotIncreasing(fmt_rational(&w[1])));
        }
        for (i, b) in breakpoints.iter().enumerate() {
            let left = pieces[i].apply(b);
            let right = pieces[i + 1].apply(b);
            if left != right {
                return Err(RealError::Discontinuous {
                    at: fmt_rational(b),
                    left: fmt_rational(&left),
                    right: fmt_rational(&right),
                });
            }
        }
        Ok(Self { breakpoints, pieces })
    }

    pub fn affine(a: Affine) -> Self {
        Self { breakpoints: vec![], pieces: vec![a] }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    /// Closed domain of piece `i`.
    pub fn domain(&self, i: usize) -> Interval {
        let lower = if i == 0 { Lower::Unbounded } else { Lower::Closed(self.breakpoints[i - 1].clone()) };
        let upper =
            if i == self.breakpoints.len() { Upper::Unbounded } else { Upper::Closed(self.breakpoints[i].clone()) };
        Interval::new(lower, upper).unwrap()
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        let i = self.breakpoints.partition_point(|b| b < x);
        self.pieces[i].apply(x)
    }

    /// True iff every slope is nonzero and all slopes share a sign, which
    /// makes the map a strictly monotone (hence open) map.
    pub fn is_open(&self) -> bool {
        let pos = self.pieces.iter().all(|p| p.slope.is_positive());
        let neg = self.pieces.iter().all(|p| p.slope.is_negative());
        pos || neg
    }

    /// Open and onto, i.e. a homeomorphism of the line.
    pub fn is_invertible(&self) -> bool {
        self.is_open()
    }

    pub fn preimage(&self, a: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            let dom = IntervalSet::from_interval(self.domain(i));
            for c in a.components() {
                let pre = piece.preimage(c).intersect(&dom);
                parts.extend(pre.components().iter().cloned());
            }
        }
        IntervalSet::from_intervals(parts)
    }

    pub fn image(&self, a: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            let dom = self.domain(i);
            for c in a.components() {
                if let Some(j) = c.intersect(&dom) {
                    parts.push(piece.image(&j));
                }
            }
        }
        IntervalSet::from_intervals(parts)
    }
}

impl fmt::Display for PiecewiseAffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.breakpoints.is_empty() {
            return write!(f, "{}", self.pieces[0]);
        }
        f.write_str("piecewise ")?;
        let k = self.breakpoints.len();
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            let b = |j: usize| fmt_rational(&self.breakpoints[j]);
            if i == 0 {
                write!(f, "x<={} : {piece}", b(0))?;
            } else if i == k {
                write!(f, "x>{} : {piece}", b(k - 1))?;
            } else {
                write!(f, "{}<x<={} : {piece}", b(i - 1), b(i))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realline::q;

    fn doubling() -> PiecewiseAffineMap {
        PiecewiseAffineMap::affine(Affine::new(q(2, 1), q(0, 1)))
    }

    fn kinked() -> PiecewiseAffineMap {
        PiecewiseAffineMap::new(vec![q(0, 1)], vec![Affine::constant(q(0, 1)), Affine::new(q(2, 1), q(0, 1))]).unwrap()
    }

    fn below(v: Rational) -> IntervalSet {
        IntervalSet::from_interval(Interval::new(Lower::Unbounded, Upper::Open(v)).unwrap())
    }

    fn above(v: Rational) -> IntervalSet {
        IntervalSet::from_interval(Interval::new(Lower::Open(v), Upper::Unbounded).unwrap())
    }

    #[test]
    fn preimage_under_doubling() {
        assert_eq!(doubling().preimage(&below(q(1, 1))), below(q(1, 2)));
        assert_eq!(kinked().preimage(&below(q(1, 1))), below(q(1, 2)));
    }

    #[test]
    fn preimage_under_constant() {
        let zero = PiecewiseAffineMap::affine(Affine::constant(q(0, 1)));
        assert!(zero.preimage(&above(q(0, 1))).is_empty());
        assert!(zero.preimage(&below(q(1, 1))).is_everything());
    }

    #[test]
    fn preimage_of_everything() {
        for m in [doubling(), kinked()] {
            assert!(m.preimage(&IntervalSet::everything()).is_everything());
        }
    }

    #[test]
    fn images() {
        assert_eq!(doubling().image(&below(q(0, 1))), below(q(0, 1)));
        let c = PiecewiseAffineMap::affine(Affine::constant(q(3, 1)));
        assert_eq!(c.image(&above(q(0, 1))), IntervalSet::from_interval(Interval::point(q(3, 1))));
        assert!(doubling().image(&IntervalSet::empty()).is_empty());
        assert_eq!(kinked().image(&below(q(1, 1))).to_string(), "[0, 2)");
    }

    #[test]
    fn negative_slope() {
        let neg = PiecewiseAffineMap::affine(Affine::new(q(-1, 1), q(1, 1)));
        assert_eq!(neg.preimage(&above(q(0, 1))), below(q(1, 1)));
        assert!(neg.is_open());
    }

    #[test]
    fn discontinuity_is_rejected() {
        let r = PiecewiseAffineMap::new(vec![q(0, 1)], vec![Affine::constant(q(1, 1)), Affine::new(q(2, 1), q(0, 1))]);
        assert!(matches!(r, Err(RealError::Discontinuous { .. })));
    }

    #[test]
    fn openness_flag() {
        assert!(doubling().is_open());
        assert!(!kinked().is_open());
        let vee =
            PiecewiseAffineMap::new(vec![q(0, 1)], vec![Affine::new(q(-1, 1), q(0, 1)), Affine::new(q(1, 1), q(0, 1))])
                .unwrap();
        assert!(!vee.is_open());
    }

    #[test]
    fn display() {
        assert_eq!(kinked().to_string(), "piecewise x<=0 : 0 ; x>0 : 2*x");
        assert_eq!(PiecewiseAffineMap::affine(Affine::new(q(1, 1), q(1, 1))).to_string(), "x + 1");
        assert_eq!(Affine::new(q(-1, 2), q(-3, 1)).to_string(), "-1/2*x - 3");
    }
}
