use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::formula::{translate_weak, Formula};
use crate::hilbert::{BoxRendering, LogicSpec};
use crate::parser::print_poset_model;
use crate::poset::{eval, CompiledFormula, DynamicPoset, PosetModel};

use super::enumerate::{frames_over, model_from, partial_orders, valuations};
use super::random::random_model;
use super::{ClassKind, SearchError, SemanticClass};

/// A model and a world at which `formula` fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: PosetModel,
    pub world: usize,
    pub formula: Formula,
}

impl Countermodel {
    /// Re-evaluates the formula and the class conditions.
    pub fn recheck(&self, kind: ClassKind) -> bool {
        let frame = &self.model.frame;
        let in_class = frame.is_continuous() && (kind == ClassKind::Expanding || frame.is_open());
        in_class && matches!(eval(&self.model, &self.formula), Ok(ext) if !ext.contains(self.world))
    }

    pub fn world_name(&self) -> &str {
        self.model.frame.name(self.world)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No countermodel with at most this many worlds.
    ValidUpTo(usize),
    Countermodel(Box<Countermodel>),
    Undetermined(String),
}

impl Verdict {
    pub fn is_valid_up_to(&self) -> bool {
        matches!(self, Verdict::ValidUpTo(_))
    }

    pub fn countermodel(&self) -> Option<&Countermodel> {
        match self {
            Verdict::Countermodel(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ValidUpTo(n) => write!(f, "valid up to {n} worlds"),
            Verdict::Countermodel(c) => {
                write!(f, "countermodel with {} worlds, falsified at {}", c.model.frame.len(), c.world_name())
            }
            Verdict::Undetermined(why) => write!(f, "undetermined: {why}"),
        }
    }
}

/// Searches `class` exhaustively for a countermodel to `f`. Carriers are
/// visited in increasing size and, within a size, in the order of
/// [`partial_orders`]; the reported countermodel is the first in that
/// order even though orders are examined in parallel.
pub fn validity(f: &Formula, class: SemanticClass) -> Result<Verdict, SearchError> {
    class.check()?;
    let compiled = CompiledFormula::new(f);
    let atoms: Vec<String> = compiled.atoms().iter().map(|a| a.to_string()).collect();
    let atom_refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
    for n in 1..=class.bound {
        let found = partial_orders(n).par_iter().find_map_first(|up| {
            for frame in frames_over(class.kind, up) {
                let all = frame.all();
                for values in valuations(&frame, atom_refs.len()) {
                    let root = compiled.eval_root(&frame, &values);
                    if root != all {
                        let world = all.difference(root).iter().next().unwrap();
                        return Some(Countermodel {
                            model: model_from(&frame, &atom_refs, &values),
                            world,
                            formula: f.clone(),
                        });
                    }
                }
            }
            None
        });
        if let Some(c) = found {
            if !c.recheck(class.kind) {
                return Ok(Verdict::Undetermined("countermodel failed re-evaluation".into()));
            }
            return Ok(Verdict::Countermodel(Box::new(c)));
        }
    }
    Ok(Verdict::ValidUpTo(class.bound))
}

/// Evaluates `f` on `samples` random models of `kind` with up to `worlds`
/// worlds, drawn from a ChaCha stream seeded with `seed`. Finding nothing
/// is reported as undetermined.
pub fn sampled_validity(f: &Formula, kind: ClassKind, worlds: usize, samples: usize, seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<String> = f.atoms().iter().map(|a| a.to_string()).collect();
    let atom_refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
    for _ in 0..samples {
        let model = random_model(&mut rng, worlds, kind, &atom_refs);
        let ext = eval(&model, f).expect("random models are continuous").set();
        if ext != model.frame.all() {
            let world = model.frame.all().difference(ext).iter().next().unwrap();
            return Verdict::Countermodel(Box::new(Countermodel { model, world, formula: f.clone() }));
        }
    }
    Verdict::Undetermined(format!("no countermodel among {samples} samples with seed {seed}"))
}

/// One schema instance checked by [`soundness_sweep`].
#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub schema: &'static str,
    pub instance: Formula,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub logic: String,
    pub class: SemanticClass,
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    pub fn failures(&self) -> Vec<&SweepEntry> {
        self.entries.iter().filter(|e| !e.verdict.is_valid_up_to()).collect()
    }
}

/// Instantiates every axiom of `logic` with `phi:=p, psi:=q, chi:=r` and
/// searches `class` for a countermodel. Weak-rendered logics are checked on
/// the `[*]` form of each instance.
pub fn soundness_sweep(logic: &LogicSpec, class: SemanticClass) -> Result<SweepReport, SearchError> {
    class.check()?;
    let subst = [("phi", "p"), ("psi", "q"), ("chi", "r")]
        .into_iter()
        .map(|(m, a)| (m.to_string(), Formula::atom(a)))
        .collect();
    let entries = logic
        .axioms
        .iter()
        .map(|s| {
            let mut instance = s.instantiate(&subst).expect("all metavariables covered");
            if logic.rendering == BoxRendering::Weak {
                instance = translate_weak(&instance);
            }
            let verdict = validity(&instance, class)?;
            Ok(SweepEntry { schema: s.name, instance, verdict })
        })
        .collect::<Result<_, SearchError>>()?;
    Ok(SweepReport { logic: logic.name.clone(), class, entries })
}

/// Structured record of a validity query: a header line followed, for a
/// countermodel, by the model in the model file format.
pub fn verdict_record(f: &Formula, class: SemanticClass, verdict: &Verdict) -> String {
    let mut out = format!("formula: {f}\nclass: {}\nbound: {}\n", class.kind.letter(), class.bound);
    match verdict {
        Verdict::ValidUpTo(n) => out.push_str(&format!("verdict: valid-up-to {n}\n")),
        Verdict::Undetermined(why) => out.push_str(&format!("verdict: undetermined\nreason: {why}\n")),
        Verdict::Countermodel(c) => {
            out.push_str(&format!("verdict: countermodel\nworld: {}\n", c.world_name()));
            out.push_str(&print_poset_model(&c.model));
        }
    }
    out
}

/// Whether `frame` belongs to the class, ignoring the size bound.
pub fn in_class(frame: &DynamicPoset, kind: ClassKind) -> bool {
    frame.is_continuous() && (kind == ClassKind::Expanding || frame.is_open())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::named;
    use crate::parser::parse_formula;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn fischer_servi_fails_on_expanding_posets() {
        let v = validity(&named::fs_dia(&p(), &q()), SemanticClass::expanding(3)).unwrap();
        let c = v.countermodel().expect("countermodel");
        assert!(c.recheck(ClassKind::Expanding));
        assert!(!c.model.frame.is_open());
    }

    #[test]
    fn fischer_servi_holds_on_persistent_posets() {
        let v = validity(&named::fs_dia(&p(), &q()), SemanticClass::persistent(3)).unwrap();
        assert_eq!(v, Verdict::ValidUpTo(3));
    }

    #[test]
    fn deterministic_first_countermodel() {
        let f = parse_formula("<>p -> p").unwrap();
        let a = validity(&f, SemanticClass::expanding(3)).unwrap();
        let b = validity(&f, SemanticClass::expanding(3)).unwrap();
        assert_eq!(a, b);
        // one world cannot separate <>p from p
        assert_eq!(a.countermodel().unwrap().model.frame.len(), 2);
    }

    #[test]
    fn sampling_is_reproducible() {
        let f = parse_formula("O p -> p").unwrap();
        let a = sampled_validity(&f, ClassKind::Expanding, 4, 50, 7);
        let b = sampled_validity(&f, ClassKind::Expanding, 4, 50, 7);
        assert_eq!(a, b);
        assert!(a.countermodel().is_some());
    }

    #[test]
    fn sweep_of_itl_is_clean() {
        let r = soundness_sweep(&LogicSpec::parse("ITL").unwrap(), SemanticClass::expanding(2)).unwrap();
        assert!(r.failures().is_empty(), "{:?}", r.failures());
    }
}
