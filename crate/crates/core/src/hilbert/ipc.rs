//! Intuitionistic propositional validity by the contraction-free sequent
//! calculus G4ip, which terminates without loop checking.

use std::collections::HashMap;

use crate::formula::Formula;

/// Replaces each maximal tensed subformula by an atom, equal subformulas by
/// equal atoms. The fresh names are not identifiers, so they cannot clash
/// with atoms of the input.
pub fn abstract_tenses(f: &Formula) -> Formula {
    fn go(f: &Formula, table: &mut HashMap<Formula, Formula>) -> Formula {
        match f {
            Formula::Bottom | Formula::Atom(_) => f.clone(),
            Formula::And(l, r) => Formula::and(go(l, table), go(r, table)),
            Formula::Or(l, r) => Formula::or(go(l, table), go(r, table)),
            Formula::Implies(l, r) => Formula::implies(go(l, table), go(r, table)),
            tensed => {
                let n = table.len();
                table.entry(tensed.clone()).or_insert_with(|| Formula::atom(&format!("#{n}"))).clone()
            }
        }
    }
    go(f, &mut HashMap::new())
}

/// True iff the tense abstraction of `f` is an intuitionistic tautology.
pub fn is_ipc_tautology(f: &Formula) -> bool {
    let mut prover = Prover::default();
    prover.prove(Vec::new(), abstract_tenses(f))
}

/// True iff `goal` follows intuitionistically from `hypotheses`, with
/// tensed subformulas treated as atoms.
pub fn ipc_entails(hypotheses: &[Formula], goal: &Formula) -> bool {
    let conj = hypotheses.iter().cloned().reduce(Formula::and);
    let f = match conj {
        Some(h) => Formula::implies(h, goal.clone()),
        None => goal.clone(),
    };
    is_ipc_tautology(&f)
}

#[derive(Default)]
struct Prover {
    memo: HashMap<(Vec<Formula>, Formula), bool>,
}

impl Prover {
    fn prove(&mut self, mut ctx: Vec<Formula>, goal: Formula) -> bool {
        ctx.sort();
        ctx.dedup();
        let key = (ctx, goal);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = self.search(key.0.clone(), &key.1);
        self.memo.insert(key, r);
        r
    }

    fn search(&mut self, mut ctx: Vec<Formula>, goal: &Formula) -> bool {
        // invertible left rules
        loop {
            if ctx.iter().any(|h| *h == Formula::Bottom || h == goal) {
                return true;
            }
            let Some(i) = ctx.iter().position(|h| left_invertible(h, &ctx)) else {
                break;
            };
            let h = ctx.swap_remove(i);
            match h {
                Formula::And(a, b) => {
                    ctx.push((*a).clone());
                    ctx.push((*b).clone());
                }
                Formula::Or(a, b) => {
                    let mut left = ctx.clone();
                    left.push((*a).clone());
                    ctx.push((*b).clone());
                    return self.prove(left, goal.clone()) && self.prove(ctx, goal.clone());
                }
                Formula::Implies(a, b) => match &*a {
                    Formula::Bottom => {}
                    Formula::Atom(_) => ctx.push((*b).clone()),
                    Formula::And(c, d) => {
                        ctx.push(Formula::implies((**c).clone(), Formula::implies((**d).clone(), (*b).clone())))
                    }
                    Formula::Or(c, d) => {
                        ctx.push(Formula::implies((**c).clone(), (*b).clone()));
                        ctx.push(Formula::implies((**d).clone(), (*b).clone()));
                    }
                    _ => unreachable!("not left-invertible"),
                },
                _ => unreachable!("not left-invertible"),
            }
        }
        // invertible right rules
        match goal {
            Formula::And(a, b) => {
                return self.prove(ctx.clone(), (**a).clone()) && self.prove(ctx, (**b).clone());
            }
            Formula::Implies(a, b) => {
                let mut c = ctx;
                c.push((**a).clone());
                return self.prove(c, (**b).clone());
            }
            _ => {}
        }
        // choices
        if let Formula::Or(a, b) = goal {
            if self.prove(ctx.clone(), (**a).clone()) || self.prove(ctx.clone(), (**b).clone()) {
                return true;
            }
        }
        for i in 0..ctx.len() {
            let Formula::Implies(ante, b) = &ctx[i] else { continue };
            let Formula::Implies(c, d) = &**ante else { continue };
            let mut rest = ctx.clone();
            rest.swap_remove(i);
            let mut left = rest.clone();
            left.push(Formula::implies((**d).clone(), (**b).clone()));
            left.push((**c).clone());
            if self.prove(left, (**d).clone()) {
                let mut right = rest;
                right.push((**b).clone());
                if self.prove(right, goal.clone()) {
                    return true;
                }
            }
        }
        false
    }
}

fn left_invertible(h: &Formula, ctx: &[Formula]) -> bool {
    match h {
        Formula::And(..) | Formula::Or(..) => true,
        Formula::Implies(a, _) => match &**a {
            Formula::Bottom | Formula::And(..) | Formula::Or(..) => true,
            Formula::Atom(_) => ctx.contains(a),
            _ => false,
        },
        _ => false,
    }
}
