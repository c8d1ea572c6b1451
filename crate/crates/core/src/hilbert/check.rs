use std::fmt;

use crate::formula::{in_fragment, translate_strong, Formula, Tense};

use super::ipc::is_ipc_tautology;
use super::logic::{BoxRendering, LogicSpec};
use super::schema::{instantiate, match_template, schema, Subst};
use super::{Derivation, HilbertError, Justification, Line};

/// Outcome of checking a derivation. Line numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofVerdict {
    Accepted { lines: usize, theorem: Formula },
    Rejected { line: usize, reason: String },
}

impl ProofVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, ProofVerdict::Accepted { .. })
    }

    pub fn rejected_line(&self) -> Option<usize> {
        match self {
            ProofVerdict::Rejected { line, .. } => Some(*line),
            _ => None,
        }
    }
}

impl fmt::Display for ProofVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofVerdict::Accepted { lines: 1, .. } => f.write_str("accepted (1 line)"),
            ProofVerdict::Accepted { lines, .. } => write!(f, "accepted ({lines} lines)"),
            ProofVerdict::Rejected { line, reason } => write!(f, "rejected at line {line}: {reason}"),
        }
    }
}

/// Checks `deriv` in `logic`. Weak-rendered logics go through
/// [`check_weak`]; a derivation mixing both boxes is then rejected at the
/// first line where the mix appears.
pub fn check(deriv: &Derivation, logic: &LogicSpec) -> ProofVerdict {
    match logic.rendering {
        BoxRendering::Strong => check_lines(deriv, deriv, logic),
        BoxRendering::Weak => match check_weak(deriv, logic) {
            Ok(v) => v,
            Err(HilbertError::MixedBoxes { line }) => {
                ProofVerdict::Rejected { line, reason: "mixes [] and [*]".to_string() }
            }
            Err(e) => ProofVerdict::Rejected { line: 1, reason: e.to_string() },
        },
    }
}

/// Checks a derivation written with `[*]` by translating it to `[]` and
/// checking against the strong axioms stored in `logic`.
pub fn check_weak(deriv: &Derivation, logic: &LogicSpec) -> Result<ProofVerdict, HilbertError> {
    if logic.rendering != BoxRendering::Weak {
        return Err(HilbertError::NotWeak(logic.name.clone()));
    }
    let (mut strong, mut weak) = (false, false);
    for i in 0..deriv.lines.len() {
        for f in deriv.line_formulas(i) {
            let ts = f.tenses();
            strong |= ts.contains(&Tense::StrongBox);
            weak |= ts.contains(&Tense::WeakBox);
        }
        if strong && weak {
            return Err(HilbertError::MixedBoxes { line: i + 1 });
        }
    }
    let internal = deriv.map_formulas(translate_strong);
    Ok(check_lines(deriv, &internal, logic))
}

/// `surface` is checked for fragment membership, `internal` (its strong
/// rendering) for correctness.
fn check_lines(surface: &Derivation, internal: &Derivation, logic: &LogicSpec) -> ProofVerdict {
    if internal.lines.is_empty() {
        return ProofVerdict::Rejected { line: 0, reason: "empty derivation".to_string() };
    }
    for i in 0..internal.lines.len() {
        let reject = |reason: String| ProofVerdict::Rejected { line: i + 1, reason };
        if let Some(f) = surface.line_formulas(i).into_iter().find(|f| !in_fragment(f, logic.fragment)) {
            return reject(format!("{f} lies outside the language {} of {}", logic.fragment.name(), logic.name));
        }
        if let Err(reason) = check_line(internal, i, logic) {
            return reject(reason);
        }
    }
    ProofVerdict::Accepted { lines: surface.lines.len(), theorem: surface.theorem().unwrap().clone() }
}

fn check_line(deriv: &Derivation, i: usize, logic: &LogicSpec) -> Result<(), String> {
    let Line { formula, justification, .. } = &deriv.lines[i];
    match justification {
        Justification::IpcTaut => {
            if is_ipc_tautology(formula) {
                Ok(())
            } else {
                Err("not an intuitionistic tautology once tensed subformulas are treated as atoms".into())
            }
        }
        Justification::Axiom { schema: name, subst } => {
            let Some(s) = logic.axiom(name) else {
                return Err(match schema(name) {
                    Some(s) => format!("axiom {} is not part of {}", s.name, logic.name),
                    None => format!("unknown axiom {name}"),
                });
            };
            match subst {
                Some(sub) => {
                    let mvs = s.metavariables();
                    if let Some(extra) = sub.keys().find(|k| !mvs.contains(k)) {
                        return Err(format!("axiom {} has no metavariable {extra}", s.name));
                    }
                    let expected = instantiate(&s.template, sub).map_err(|e| e.to_string())?;
                    if &expected == formula {
                        Ok(())
                    } else {
                        Err(format!("the stated instance of {} is {expected}", s.name))
                    }
                }
                None => {
                    if match_template(&s.template, formula, &mut Subst::new()) {
                        Ok(())
                    } else {
                        Err(format!("not an instance of axiom {} ({})", s.name, s.template))
                    }
                }
            }
        }
        Justification::Rule { rule: name, premises } => {
            let Some(r) = logic.rule(name) else {
                return Err(format!("rule {name} is not available in {}", logic.name));
            };
            if let Some(&bad) = premises.iter().find(|&&j| j >= i) {
                return Err(format!("premise {} does not precede the line", bad + 1));
            }
            let prem: Vec<&Formula> = premises.iter().map(|&j| &deriv.lines[j].formula).collect();
            r.applies(&prem, formula)
        }
    }
}

/// A single-line perturbation of a derivation.
#[derive(Clone, Debug)]
pub struct Mutation {
    /// 1-based line that was changed.
    pub line: usize,
    pub description: String,
    pub derivation: Derivation,
}

/// Single-line mutations that make the changed line incorrect whatever the
/// logic: the formula is replaced by `f & false`, by `O f` or by `false`,
/// or a rule premise is redirected to an earlier line with a different
/// formula.
pub fn mutations(deriv: &Derivation) -> Vec<Mutation> {
    let mut out = Vec::new();
    for (i, line) in deriv.lines.iter().enumerate() {
        let f = &line.formula;
        let mut replacements = vec![
            ("conjoined with false", Formula::and(f.clone(), Formula::Bottom)),
            ("put under O", Formula::next(f.clone())),
        ];
        if *f != Formula::Bottom {
            replacements.push(("replaced by false", Formula::Bottom));
        }
        for (what, g) in replacements {
            let mut d = deriv.clone();
            d.lines[i].formula = g;
            out.push(Mutation { line: i + 1, description: format!("formula {what}"), derivation: d });
        }
        if let Justification::Rule { premises, .. } = &line.justification {
            for (k, &j) in premises.iter().enumerate() {
                let target = &deriv.lines[j].formula;
                if let Some(alt) = (0..i).find(|&a| a != j && deriv.lines[a].formula != *target) {
                    let mut d = deriv.clone();
                    if let Justification::Rule { premises, .. } = &mut d.lines[i].justification {
                        premises[k] = alt;
                    }
                    out.push(Mutation {
                        line: i + 1,
                        description: format!("premise {} redirected from line {} to line {}", k + 1, j + 1, alt + 1),
                        derivation: d,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_derivation;

    fn logic(name: &str) -> LogicSpec {
        LogicSpec::parse(name).unwrap()
    }

    #[test]
    fn short_derivation() {
        let d = parse_derivation(
            "1. []p -> p ; axiom viii {phi:=p}\n\
             2. ([]p -> p) -> ([]p -> p) | q ; ipc-taut\n\
             3. ([]p -> p) | q ; mp 1 2\n\
             4. []([]p -> p | q) ; nec-box 3\n",
        );
        // line 4 has a different grouping than line 3, so it must fail
        let d = d.unwrap();
        let v = check(&d, &logic("ITL"));
        assert_eq!(v.rejected_line(), Some(4));
    }

    #[test]
    fn accepted_derivation() {
        let d = parse_derivation(
            "1. []p -> p ; axiom viii {phi:=p}\n\
             2. ([]p -> p) -> ([]p -> p) | q ; ipc-taut\n\
             3. ([]p -> p) | q ; mp 1 2\n\
             4. []([]p -> p) | q) ; nec-box 3\n",
        );
        assert!(d.is_err());
        let d = parse_derivation(
            "1. []p -> p ; axiom viii {phi:=p}\n\
             2. ([]p -> p) -> ([]p -> p) | q ; ipc-taut\n\
             3. ([]p -> p) | q ; mp 1 2\n\
             4. []( ([]p -> p) | q ) ; nec-box 3\n",
        )
        .unwrap();
        assert_eq!(
            check(&d, &logic("ITL")),
            ProofVerdict::Accepted { lines: 4, theorem: d.theorem().unwrap().clone() }
        );
    }

    #[test]
    fn fragment_is_enforced() {
        let d = parse_derivation("1. p -> <>p ; axiom x\n").unwrap();
        assert!(check(&d, &logic("ITL")).is_accepted());
        assert_eq!(check(&d, &logic("ITL.b")).rejected_line(), Some(1));
    }

    #[test]
    fn weak_rendering_lacks_box_fix() {
        let d = parse_derivation("1. [*]p -> O[*]p ; axiom ix\n").unwrap();
        assert!(!check(&d, &logic("ITL.dw")).is_accepted());
        assert!(check(&d, &logic("CDTL.dw")).is_accepted());
        let wh = parse_derivation("1. [*]p -> [*]O p ; axiom wh\n").unwrap();
        assert!(check(&wh, &logic("ITL.dw")).is_accepted());
    }

    #[test]
    fn mixed_boxes() {
        let d = parse_derivation("1. []p -> p ; axiom viii\n2. [*]p -> p ; axiom viii\n").unwrap();
        assert_eq!(check_weak(&d, &logic("ITL.dw")), Err(HilbertError::MixedBoxes { line: 2 }));
        assert_eq!(check(&d, &logic("ITL.dw")).rejected_line(), Some(2));
    }

    #[test]
    fn axiom_outside_logic() {
        let d = parse_derivation("1. [](p | q) -> []p | <>q ; axiom cd\n").unwrap();
        assert!(!check(&d, &logic("ITL")).is_accepted());
        assert!(check(&d, &logic("CDTL")).is_accepted());
    }

    #[test]
    fn wrong_substitution() {
        let d = parse_derivation("1. []q -> q ; axiom viii {phi:=p}\n").unwrap();
        assert_eq!(check(&d, &logic("ITL")).rejected_line(), Some(1));
        let d = parse_derivation("1. []q -> q ; axiom viii {phi:=q, psi:=p}\n").unwrap();
        assert_eq!(check(&d, &logic("ITL")).rejected_line(), Some(1));
    }
}
