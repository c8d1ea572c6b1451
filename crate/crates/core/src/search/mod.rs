//! Exhaustive and sampled countermodel search over finite dynamic posets,
//! and verification of the separation edges.

mod enumerate;
pub mod random;
mod separation;
mod validity;

pub use enumerate::{
    canonical_form, count_models, enumerate_models, frames, frames_of_size, isomorphic, model_from, monotone_maps,
    partial_orders, valuations, CanonicalForm,
};
pub use separation::{build_separation_matrix, sound_for, EdgeReport, EdgeStatus, SeparationMatrix, Witness};
pub use validity::{
    in_class, sampled_validity, soundness_sweep, validity, verdict_record, Countermodel, SweepEntry, SweepReport,
    Verdict,
};

use std::fmt;

use thiserror::Error;

/// Largest carrier the exhaustive search accepts.
pub const MAX_BOUND: usize = 5;

/// Bound used when none is given.
pub const DEFAULT_BOUND: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("bound {bound} exceeds the maximum of {max} worlds")]
    BoundTooLarge { bound: usize, max: usize },
    #[error("bound must be at least 1")]
    ZeroBound,
}

/// Expanding posets have a monotone map; persistent ones also an open map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassKind {
    Expanding,
    Persistent,
}

impl ClassKind {
    pub fn letter(self) -> &'static str {
        match self {
            ClassKind::Expanding => "e",
            ClassKind::Persistent => "p",
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        match s {
            "e" => Some(ClassKind::Expanding),
            "p" => Some(ClassKind::Persistent),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SemanticClass {
    pub kind: ClassKind,
    /// Largest number of worlds.
    pub bound: usize,
}

impl SemanticClass {
    pub fn expanding(bound: usize) -> Self {
        SemanticClass { kind: ClassKind::Expanding, bound }
    }

    pub fn persistent(bound: usize) -> Self {
        SemanticClass { kind: ClassKind::Persistent, bound }
    }

    pub fn check(&self) -> Result<(), SearchError> {
        match self.bound {
            0 => Err(SearchError::ZeroBound),
            b if b > MAX_BOUND => Err(SearchError::BoundTooLarge { bound: b, max: MAX_BOUND }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at most {} worlds)", self.kind.letter(), self.bound)
    }
}
