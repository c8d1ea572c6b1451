//! Intuitionistic temporal logics over dynamic posets and the real line.

pub mod corpus;
pub mod formula;
pub mod hilbert;
pub mod parser;
pub mod poset;
pub mod realline;
pub mod search;
