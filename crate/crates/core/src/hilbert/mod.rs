//! Axiom systems and a checker for Hilbert-style derivations.

mod check;
mod ipc;
mod logic;
mod schema;

pub use check::{check, check_weak, mutations, Mutation, ProofVerdict};
pub use ipc::{abstract_tenses, ipc_entails, is_ipc_tautology};
pub use logic::{BaseLogic, BoxRendering, LogicSpec, Variant};
pub use schema::{
    catalog, instantiate, match_template, metavariable, rule, rules, schema, Rule, Schema, Subst, IPC_BASIS,
    METAVARIABLES,
};

use thiserror::Error;

use crate::formula::Formula;
use crate::parser::SourceSpan;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HilbertError {
    #[error("substitution does not cover metavariable {0}")]
    MissingMetavariable(String),
    #[error("derivation mixes [] and [*] (line {line})")]
    MixedBoxes { line: usize },
    #[error("unknown logic '{0}'")]
    UnknownLogic(String),
    #[error("{0} is not a weak-rendered logic")]
    NotWeak(String),
}

/// How a line was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// Instance of a named schema, with an optional explicit substitution.
    Axiom { schema: String, subst: Option<Subst> },
    /// Application of a rule to earlier lines (0-based indices).
    Rule { rule: String, premises: Vec<usize> },
    /// Intuitionistic tautology after tense abstraction.
    IpcTaut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub justification: Justification,
    pub span: SourceSpan,
}

/// An ordered list of justified lines; the last line is the theorem.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Derivation {
    pub lines: Vec<Line>,
}

impl Derivation {
    pub fn theorem(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Applies `f` to every formula, including substitution values.
    pub fn map_formulas<F: Fn(&Formula) -> Formula>(&self, f: F) -> Derivation {
        let lines = self
            .lines
            .iter()
            .map(|l| Line {
                formula: f(&l.formula),
                justification: match &l.justification {
                    Justification::Axiom { schema, subst } => Justification::Axiom {
                        schema: schema.clone(),
                        subst: subst.as_ref().map(|s| s.iter().map(|(k, v)| (k.clone(), f(v))).collect()),
                    },
                    j => j.clone(),
                },
                span: l.span,
            })
            .collect();
        Derivation { lines }
    }

    /// Every formula of line `i`, substitution values included.
    pub(crate) fn line_formulas(&self, i: usize) -> Vec<&Formula> {
        let l = &self.lines[i];
        let mut out = vec![&l.formula];
        if let Justification::Axiom { subst: Some(s), .. } = &l.justification {
            out.extend(s.values());
        }
        out
    }
}
