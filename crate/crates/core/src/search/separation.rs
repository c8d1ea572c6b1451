use std::fmt;

use rayon::prelude::*;

use crate::corpus::{Artifact, Corpus, CorpusError, Edge};
use crate::formula::Formula;
use crate::hilbert::{
    check, schema, BaseLogic, Derivation, Justification, Line, LogicSpec, ProofVerdict, Subst, Variant,
};
use crate::parser::{parse_rational, SourceSpan};
use crate::poset::eval;
use crate::realline::eval_real;

/// Corpus id of the edge list.
pub const EDGES_ID: &str = "fig6-edges";

/// The point at which a witness structure falsifies an edge label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    World { entry: String, world: String },
    Point { entry: String, point: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeStatus {
    Verified,
    Failed(String),
    /// No bundled witness; nothing was checked.
    Unverified(String),
}

impl fmt::Display for EdgeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeStatus::Verified => f.write_str("verified"),
            EdgeStatus::Failed(why) => write!(f, "FAILED: {why}"),
            EdgeStatus::Unverified(why) => write!(f, "unverified: {why}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EdgeReport {
    pub edge: Edge,
    pub formula: Formula,
    pub witness: Option<Witness>,
    /// What the witness evaluation found.
    pub witness_detail: String,
    /// One-line derivation of the label in the target logic.
    pub membership: ProofVerdict,
    pub status: EdgeStatus,
}

#[derive(Clone, Debug)]
pub struct SeparationMatrix {
    pub edges: Vec<EdgeReport>,
}

impl SeparationMatrix {
    pub fn all_verified(&self) -> bool {
        self.edges.iter().all(|e| e.status == EdgeStatus::Verified)
    }

    pub fn failed(&self) -> Vec<&EdgeReport> {
        self.edges.iter().filter(|e| matches!(e.status, EdgeStatus::Failed(_))).collect()
    }

    pub fn unverified(&self) -> Vec<&EdgeReport> {
        self.edges.iter().filter(|e| matches!(e.status, EdgeStatus::Unverified(_))).collect()
    }

    /// Logics appearing on some edge, in the canonical order.
    fn logics(&self) -> Vec<BaseLogic> {
        BaseLogic::ALL.into_iter().filter(|b| self.edges.iter().any(|e| e.edge.from == *b || e.edge.to == *b)).collect()
    }

    /// A grid with one row per source logic and one column per target
    /// logic, then one line per edge.
    pub fn render_plain(&self) -> String {
        let logics = self.logics();
        let width = 12;
        let mut out = format!("{:<8}", "from\\to");
        for l in &logics {
            out.push_str(&format!("{:<width$}", l.name()));
        }
        out.push('\n');
        for from in &logics {
            out.push_str(&format!("{:<8}", from.name()));
            for to in &logics {
                let cell = match self.edges.iter().find(|e| e.edge.from == *from && e.edge.to == *to) {
                    None => ".".to_string(),
                    Some(r) => {
                        let mark = match r.status {
                            EdgeStatus::Verified => "",
                            EdgeStatus::Failed(_) => "!",
                            EdgeStatus::Unverified(_) => "?",
                        };
                        let style = if r.edge.dashed { "~" } else { "" };
                        format!("{style}{}{mark}", r.edge.label)
                    }
                };
                out.push_str(&format!("{cell:<width$}"));
            }
            out.push('\n');
        }
        out.push_str("(~ dashed edge, ? unverified, ! failed)\n\n");
        for r in &self.edges {
            let witness = match &r.witness {
                Some(Witness::World { entry, world }) => format!("{entry} at {world}"),
                Some(Witness::Point { entry, point }) => format!("{entry} at {point}"),
                None => "none".into(),
            };
            out.push_str(&format!(
                "{:<22} {:<9} witness {:<16} membership {:<22} {}\n",
                r.edge.to_string(),
                r.edge.label,
                witness,
                r.membership.to_string(),
                r.status
            ));
        }
        let verified = self.edges.len() - self.failed().len() - self.unverified().len();
        out.push_str(&format!(
            "{} edges: {verified} verified, {} unverified, {} failed\n",
            self.edges.len(),
            self.unverified().len(),
            self.failed().len()
        ));
        out
    }

    /// One `key=value` record per edge.
    pub fn render_records(&self) -> String {
        let mut out = String::new();
        for r in &self.edges {
            let (entry, point) = match &r.witness {
                Some(Witness::World { entry, world }) => (entry.as_str(), world.as_str()),
                Some(Witness::Point { entry, point }) => (entry.as_str(), point.as_str()),
                None => ("-", "-"),
            };
            let status = match &r.status {
                EdgeStatus::Verified => "verified",
                EdgeStatus::Failed(_) => "failed",
                EdgeStatus::Unverified(_) => "unverified",
            };
            out.push_str(&format!(
                "edge\tfrom={}\tto={}\tstyle={}\tlabel={}\tformula={}\twitness={entry}\tpoint={point}\tmembership={}\tstatus={status}\tdetail={}\n",
                r.edge.from.name(),
                r.edge.to.name(),
                if r.edge.dashed { "dashed" } else { "solid" },
                r.edge.label,
                r.formula,
                if r.membership.is_accepted() { "accepted" } else { "rejected" },
                r.witness_detail,
            ));
        }
        out
    }
}

/// Whether `base` is known to be sound on the witness structure, so that
/// falsifying a formula there shows it is not a theorem of `base`. Finite
/// posets need a continuous map, or an open one for logics with the
/// Fischer Servi axiom; no logic with conditional excluded middle is sound
/// on finite posets. Piecewise-affine systems on the line are continuous;
/// logics with constant domain are not sound there, and those with the
/// Fischer Servi axiom need an open map.
pub fn sound_for(base: BaseLogic, witness: &Artifact) -> Result<(), String> {
    use BaseLogic::*;
    match witness {
        Artifact::PosetModel(m) => match base {
            Rtl => Err(format!("{} is not sound on finite posets", base.name())),
            ItlPlus | EtlPlus | CdtlPlus if !m.frame.is_open() => {
                Err(format!("{} needs an open map and the poset map is not open", base.name()))
            }
            _ if !m.frame.is_continuous() => Err("poset map is not continuous".into()),
            _ => Ok(()),
        },
        Artifact::RealSystem(s) => match base {
            Cdtl | CdtlPlus => Err(format!("{} is not sound on the real line", base.name())),
            ItlPlus | EtlPlus if !s.map.is_open() => {
                Err(format!("{} needs an open map and the real map is not open", base.name()))
            }
            _ => Ok(()),
        },
        _ => Err("witness is neither a poset model nor a real system".into()),
    }
}

fn label_formula(label: &str) -> (Formula, Subst) {
    let s = schema(label).expect("edge labels are validated on load");
    let subst: Subst = s.metavariables().into_iter().zip(["p", "q", "r"]).map(|(m, a)| (m, Formula::atom(a))).collect();
    (s.instantiate(&subst).expect("metavariables covered"), subst)
}

fn verify(corpus: &Corpus, edge: &Edge) -> EdgeReport {
    let (formula, subst) = label_formula(edge.label);
    let derivation = Derivation {
        lines: vec![Line {
            formula: formula.clone(),
            justification: Justification::Axiom { schema: edge.label.to_string(), subst: Some(subst) },
            span: SourceSpan::default(),
        }],
    };
    let membership = check(&derivation, &LogicSpec::new(edge.to, Variant::DiamondBox));
    let mut report = EdgeReport {
        edge: edge.clone(),
        formula: formula.clone(),
        witness: None,
        witness_detail: String::new(),
        membership: membership.clone(),
        status: EdgeStatus::Verified,
    };
    let Some((entry, point)) = &edge.witness else {
        report.witness_detail = "no witness bundled".into();
        report.status = EdgeStatus::Unverified(format!(
            "no structure falsifying {} on which {} is sound is bundled",
            edge.label,
            edge.from.name()
        ));
        return report;
    };
    let outcome: Result<String, String> = (|| {
        let artifact = corpus.load(entry).map_err(|e| e.to_string())?;
        sound_for(edge.from, &artifact)?;
        match &artifact {
            Artifact::PosetModel(m) => {
                report.witness = Some(Witness::World { entry: entry.clone(), world: point.clone() });
                let w = m.frame.world(point).ok_or_else(|| format!("{entry} has no world '{point}'"))?;
                let ext = eval(m, &formula).map_err(|e| e.to_string())?;
                let detail = format!("extension {}", m.frame.format_set(ext.set()));
                if ext.contains(w) {
                    Err(format!("{detail} contains {point}"))
                } else {
                    Ok(detail)
                }
            }
            Artifact::RealSystem(s) => {
                report.witness = Some(Witness::Point { entry: entry.clone(), point: point.clone() });
                let x = parse_rational(point).ok_or_else(|| format!("'{point}' is not a rational"))?;
                let out = eval_real(s, &formula);
                if !out.status.is_determined() {
                    return Err(format!("evaluation is {}", out.status));
                }
                let detail = format!("extension {}", out.value);
                if out.value.contains(&x) {
                    Err(format!("{detail} contains {point}"))
                } else {
                    Ok(detail)
                }
            }
            _ => Err(format!("{entry} is not a structure")),
        }
    })();
    match outcome {
        Ok(detail) => report.witness_detail = detail,
        Err(why) => {
            report.witness_detail = why.clone();
            report.status = EdgeStatus::Failed(why);
        }
    }
    if report.status == EdgeStatus::Verified && !membership.is_accepted() {
        report.status =
            EdgeStatus::Failed(format!("{} is not derivable in {}: {membership}", edge.label, edge.to.name()));
    }
    report
}

/// Checks every edge of the bundled edge list: the witness falsifies the
/// label in a structure on which the source logic is sound, and the label
/// is derivable in the target logic.
pub fn build_separation_matrix(corpus: &Corpus) -> Result<SeparationMatrix, CorpusError> {
    let edges = corpus.edges(EDGES_ID)?;
    Ok(SeparationMatrix { edges: edges.par_iter().map(|e| verify(corpus, e)).collect() })
}
