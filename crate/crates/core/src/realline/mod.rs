//! Exact semantics over the real line with a continuous piecewise-affine
//! step map and rational interval valuations.
//!
//! Infinite systems such as the plane, or rational carriers with irrational
//! breakpoints, are out of reach: everything here is a finite union of
//! intervals with rational ends.

mod eval;
mod interval;
mod map;
pub mod random;

pub use eval::{check_pointwise, eval_real, Caps, EvalOutcome, RealSystem, Status, SubformulaOutcome};
pub use interval::{Interval, IntervalSet, Lower, Upper};
pub use map::{Affine, PiecewiseAffineMap};

use thiserror::Error;

/// Exact rationals.
pub type Rational = num::BigRational;

/// `n / d`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `3`, `-1/2`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("map has {breakpoints} breakpoints but {pieces} pieces")]
    PieceCount { breakpoints: usize, pieces: usize },
    #[error("breakpoints must increase strictly (at {0})")]
    BreakpointsNotIncreasing(String),
    #[error("map is discontinuous at {at}: left piece gives {left}, right piece gives {right}")]
    Discontinuous { at: String, left: String, right: String },
    #[error("valuation of '{atom}' is not open: {set}")]
    NonOpenValuation { atom: String, set: String },
    #[error("extension of {formula} is undetermined: {reason}")]
    UndeterminedExtension { formula: String, reason: String },
}
