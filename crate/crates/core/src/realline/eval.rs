use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num::{One, Signed, Zero};

use super::interval::{Interval, IntervalSet, Lower, Upper};
use super::map::PiecewiseAffineMap;
use super::{fmt_rational, Rational, RealError};
use crate::formula::{subformulas, Formula};

/// Iteration limits of the fixed-point computations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Caps {
    /// Steps of a single chain.
    pub iter: usize,
    /// Restarts of the `[]` computation with a smaller target.
    pub restart: usize,
    /// Steps when following the orbit of a limit point.
    pub orbit: usize,
    /// Consecutive steps a branch pattern must persist before it is
    /// extrapolated.
    pub window: usize,
    /// Components a chain term may have before the chain is abandoned.
    pub parts: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { iter: 64, restart: 8, orbit: 128, window: 8, parts: 256 }
    }
}

impl fmt::Display for Caps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iter={} restart={} orbit={} window={} parts={}",
            self.iter, self.restart, self.orbit, self.window, self.parts
        )
    }
}

/// The real line with a step map and an open valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealSystem {
    pub map: PiecewiseAffineMap,
    valuation: BTreeMap<String, IntervalSet>,
    pub caps: Caps,
}

impl RealSystem {
    /// Rejects valuations that are not open.
    pub fn new(
        map: PiecewiseAffineMap,
        valuation: BTreeMap<String, IntervalSet>,
        caps: Caps,
    ) -> Result<Self, RealError> {
        for (atom, set) in &valuation {
            if !set.is_open() {
                return Err(RealError::NonOpenValuation { atom: atom.clone(), set: set.to_string() });
            }
        }
        Ok(Self { map, valuation, caps })
    }

    pub fn valuation(&self) -> &BTreeMap<String, IntervalSet> {
        &self.valuation
    }

    /// Extension of an atom; unlisted atoms are empty.
    pub fn atom(&self, name: &str) -> IntervalSet {
        self.valuation.get(name).cloned().unwrap_or_default()
    }

    /// Same map and caps with another valuation.
    pub fn with_valuation(&self, valuation: BTreeMap<String, IntervalSet>) -> Result<Self, RealError> {
        RealSystem::new(self.map.clone(), valuation, self.caps.clone())
    }
}

/// How a computed extension was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// Every fixed point was reached in finitely many steps.
    Exact,
    /// Some limit was obtained from a stable branch pattern.
    Extrapolated,
    /// No value could be certified.
    Undetermined(String),
}

impl Status {
    pub fn is_determined(&self) -> bool {
        !matches!(self, Status::Undetermined(_))
    }

    fn join(&self, other: &Status) -> Status {
        match (self, other) {
            (Status::Undetermined(r), _) | (_, Status::Undetermined(r)) => Status::Undetermined(r.clone()),
            (Status::Extrapolated, _) | (_, Status::Extrapolated) => Status::Extrapolated,
            _ => Status::Exact,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Exact => f.write_str("exact"),
            Status::Extrapolated => f.write_str("extrapolated"),
            Status::Undetermined(r) => write!(f, "undetermined ({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubformulaOutcome {
    pub formula: Formula,
    pub value: IntervalSet,
    pub status: Status,
}

/// Extension of a formula with the status of every subformula, children
/// first. Values of undetermined entries are meaningless.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub value: IntervalSet,
    pub status: Status,
    pub subformulas: Vec<SubformulaOutcome>,
}

impl EvalOutcome {
    /// `Some(true)` if the extension is the whole line, `None` when
    /// undetermined.
    pub fn is_valid(&self) -> Option<bool> {
        self.status.is_determined().then(|| self.value.is_everything())
    }

    pub fn lookup(&self, f: &Formula) -> Option<&SubformulaOutcome> {
        self.subformulas.iter().find(|s| &s.formula == f)
    }
}

enum Limit {
    Exact(IntervalSet),
    Extrapolated(IntervalSet),
    Undetermined(String),
}

enum EndLimit {
    Finite(Rational),
    NegInf,
    PosInf,
}

struct Evaluator<'a> {
    map: &'a PiecewiseAffineMap,
    caps: &'a Caps,
}

impl Evaluator<'_> {
    fn check_parts(&self, s: &IntervalSet, chain: &str) -> Result<(), String> {
        if s.components().len() > self.caps.parts {
            return Err(format!("{chain} chain split into more than {} intervals", self.caps.parts));
        }
        Ok(())
    }

    fn eventually(&self, target: &IntervalSet) -> Result<IntervalSet, String> {
        let mut u = target.clone();
        for _ in 0..self.caps.iter {
            let next = u.union(&self.map.preimage(&u));
            if next == u {
                return Ok(u);
            }
            self.check_parts(&next, "<>")?;
            u = next;
        }
        Err(format!("<> chain did not stabilize within {} steps", self.caps.iter))
    }

    /// `x` belongs to every `S^-n target` iff its orbit never leaves
    /// `target`.
    fn orbit_stays(&self, x: &Rational, target: &IntervalSet) -> Result<bool, String> {
        let mut seen = HashSet::new();
        let mut cur = x.clone();
        for _ in 0..self.caps.orbit {
            if !target.contains(&cur) {
                return Ok(false);
            }
            if !seen.insert(cur.clone()) {
                return Ok(true);
            }
            cur = self.map.apply(&cur);
        }
        Err(format!("orbit of {} not decided within {} steps", fmt_rational(x), self.caps.orbit))
    }

    /// Limit of a sequence of end points, provided one inverse branch
    /// regenerates every term from its predecessor.
    fn end_limit(&self, seq: &[&Rational]) -> Option<EndLimit> {
        if seq.windows(2).all(|w| w[0] == w[1]) {
            return Some(EndLimit::Finite(seq[0].clone()));
        }
        for (i, piece) in self.map.pieces().iter().enumerate() {
            if piece.slope.is_zero() {
                continue;
            }
            let dom = self.map.domain(i);
            let regenerated = seq.windows(2).all(|w| dom.contains(w[1]) && piece.apply(w[1]) == *w[0]);
            if !regenerated {
                continue;
            }
            let m = &piece.slope;
            if m.abs() > Rational::one() {
                let fixed = &piece.intercept / (Rational::one() - m);
                if dom.contains(&fixed) {
                    return Some(EndLimit::Finite(fixed));
                }
            } else if m.is_positive() {
                let last = seq.len() - 1;
                return Some(if seq[last] > seq[last - 1] { EndLimit::PosInf } else { EndLimit::NegInf });
            }
        }
        None
    }

    /// Tries to read off the limit of a decreasing chain from its last
    /// `window + 1` terms. `None` means the pattern is not yet stable.
    fn extrapolate(&self, target: &IntervalSet, win: &[IntervalSet]) -> Option<Result<IntervalSet, String>> {
        let shape = |s: &IntervalSet| -> Vec<(bool, bool)> {
            s.components().iter().map(|c| (c.lower.value().is_some(), c.upper.value().is_some())).collect()
        };
        let first = shape(&win[0]);
        if win.iter().any(|s| shape(s) != first) {
            return None;
        }
        let mut parts = Vec::new();
        for (j, &(finite_lo, finite_hi)) in first.iter().enumerate() {
            let lo = if finite_lo {
                let seq: Vec<&Rational> = win.iter().map(|s| s.components()[j].lower.value().unwrap()).collect();
                self.end_limit(&seq)?
            } else {
                EndLimit::NegInf
            };
            let hi = if finite_hi {
                let seq: Vec<&Rational> = win.iter().map(|s| s.components()[j].upper.value().unwrap()).collect();
                self.end_limit(&seq)?
            } else {
                EndLimit::PosInf
            };
            let lower = match lo {
                EndLimit::PosInf => continue,
                EndLimit::NegInf => Lower::Unbounded,
                EndLimit::Finite(a) => match self.orbit_stays(&a, target) {
                    Err(e) => return Some(Err(e)),
                    Ok(true) => Lower::Closed(a),
                    Ok(false) => Lower::Open(a),
                },
            };
            let upper = match hi {
                EndLimit::NegInf => continue,
                EndLimit::PosInf => Upper::Unbounded,
                EndLimit::Finite(b) => match self.orbit_stays(&b, target) {
                    Err(e) => return Some(Err(e)),
                    Ok(true) => Upper::Closed(b),
                    Ok(false) => Upper::Open(b),
                },
            };
            parts.extend(Interval::new(lower, upper));
        }
        let limit = IntervalSet::from_intervals(parts);
        (target.intersect(&self.map.preimage(&limit)) == limit).then_some(Ok(limit))
    }

    /// The intersection of `S^-n target` over all `n`.
    fn chain_limit(&self, target: &IntervalSet) -> Limit {
        let mut history = vec![target.clone()];
        for _ in 0..self.caps.iter {
            let last = history.last().unwrap();
            let next = target.intersect(&self.map.preimage(last));
            if next == *last {
                return Limit::Exact(next);
            }
            if let Err(e) = self.check_parts(&next, "[]") {
                return Limit::Undetermined(e);
            }
            history.push(next);
            if history.len() > self.caps.window {
                let win = &history[history.len() - self.caps.window - 1..];
                match self.extrapolate(target, win) {
                    Some(Ok(a)) => return Limit::Extrapolated(a),
                    Some(Err(e)) => return Limit::Undetermined(e),
                    None => {}
                }
            }
        }
        Limit::Undetermined(format!("[] chain did not stabilize or extrapolate within {} steps", self.caps.iter))
    }

    fn weak_box(&self, target: &IntervalSet) -> (IntervalSet, Status) {
        match self.chain_limit(target) {
            Limit::Exact(v) => (v.interior(), Status::Exact),
            Limit::Extrapolated(a) => (a.interior(), Status::Extrapolated),
            Limit::Undetermined(r) => (IntervalSet::empty(), Status::Undetermined(r)),
        }
    }

    fn strong_box(&self, target: &IntervalSet) -> (IntervalSet, Status) {
        let mut target = target.clone();
        let mut status = Status::Exact;
        for _ in 0..=self.caps.restart {
            match self.chain_limit(&target) {
                Limit::Exact(v) => return (v, status),
                Limit::Undetermined(r) => return (IntervalSet::empty(), Status::Undetermined(r)),
                Limit::Extrapolated(a) => {
                    status = Status::Extrapolated;
                    let c = a.interior();
                    if self.map.image(&c).is_subset(&c) {
                        return (c, status);
                    }
                    target = c;
                }
            }
        }
        (
            IntervalSet::empty(),
            Status::Undetermined(format!("no invariant open set found within {} restarts", self.caps.restart)),
        )
    }
}

/// Evaluates `f` bottom-up; limits that cannot be certified are reported
/// through the status rather than as errors.
pub fn eval_real(sys: &RealSystem, f: &Formula) -> EvalOutcome {
    let ev = Evaluator { map: &sys.map, caps: &sys.caps };
    let mut done: HashMap<Formula, (IntervalSet, Status)> = HashMap::new();
    let mut table = Vec::new();
    for g in subformulas(f) {
        let get = |h: &Formula| done.get(h).expect("children are evaluated first").clone();
        let child_status = |h: &Formula| -> Status {
            match &done[h].1 {
                Status::Undetermined(_) => Status::Undetermined(format!("depends on undetermined {h}")),
                s => s.clone(),
            }
        };
        let (value, status) = match &g {
            Formula::Bottom => (IntervalSet::empty(), Status::Exact),
            Formula::Atom(a) => (sys.atom(a), Status::Exact),
            Formula::And(l, r) => (get(l).0.intersect(&get(r).0), child_status(l).join(&child_status(r))),
            Formula::Or(l, r) => (get(l).0.union(&get(r).0), child_status(l).join(&child_status(r))),
            Formula::Implies(l, r) => {
                (get(l).0.complement().union(&get(r).0).interior(), child_status(l).join(&child_status(r)))
            }
            Formula::Next(h) => (sys.map.preimage(&get(h).0), child_status(h)),
            Formula::Eventually(h) | Formula::StrongBox(h) | Formula::WeakBox(h) => {
                let st = child_status(h);
                if !st.is_determined() {
                    (IntervalSet::empty(), st)
                } else {
                    let target = get(h).0;
                    let (v, own) = match &g {
                        Formula::Eventually(_) => match ev.eventually(&target) {
                            Ok(v) => (v, Status::Exact),
                            Err(r) => (IntervalSet::empty(), Status::Undetermined(r)),
                        },
                        Formula::StrongBox(_) => ev.strong_box(&target),
                        _ => ev.weak_box(&target),
                    };
                    (v, st.join(&own))
                }
            }
        };
        debug_assert!(!status.is_determined() || value.is_open(), "{g} evaluated to non-open {value}");
        done.insert(g.clone(), (value.clone(), status.clone()));
        table.push(SubformulaOutcome { formula: g, value, status });
    }
    let root = table.last().unwrap();
    EvalOutcome { value: root.value.clone(), status: root.status.clone(), subformulas: table }
}

/// Membership of each point in the extension of `f`.
pub fn check_pointwise(sys: &RealSystem, f: &Formula, points: &[Rational]) -> Result<Vec<bool>, RealError> {
    let out = eval_real(sys, f);
    if let Status::Undetermined(reason) = out.status {
        return Err(RealError::UndeterminedExtension { formula: f.to_string(), reason });
    }
    Ok(points.iter().map(|x| out.value.contains(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{named, translate_weak};
    use crate::parser::parse_formula;
    use crate::realline::map::Affine;
    use crate::realline::q;

    fn ray_below(v: Rational) -> IntervalSet {
        IntervalSet::from_interval(Interval::new(Lower::Unbounded, Upper::Open(v)).unwrap())
    }

    fn ray_above(v: Rational) -> IntervalSet {
        IntervalSet::from_interval(Interval::new(Lower::Open(v), Upper::Unbounded).unwrap())
    }

    fn system(map: PiecewiseAffineMap, val: &[(&str, IntervalSet)]) -> RealSystem {
        let v = val.iter().map(|(a, s)| (a.to_string(), s.clone())).collect();
        RealSystem::new(map, v, Caps::default()).unwrap()
    }

    fn kinked() -> RealSystem {
        let map =
            PiecewiseAffineMap::new(vec![q(0, 1)], vec![Affine::constant(q(0, 1)), Affine::new(q(2, 1), q(0, 1))])
                .unwrap();
        system(map, &[("p", ray_below(q(1, 1)))])
    }

    fn doubling() -> RealSystem {
        let map = PiecewiseAffineMap::affine(Affine::new(q(2, 1), q(0, 1)));
        system(map, &[("p", ray_below(q(1, 1))), ("q", ray_above(q(0, 1)))])
    }

    fn constant() -> RealSystem {
        let map = PiecewiseAffineMap::affine(Affine::constant(q(0, 1)));
        system(map, &[("p", ray_above(q(0, 1))), ("q", IntervalSet::empty())])
    }

    fn value(sys: &RealSystem, text: &str) -> IntervalSet {
        let out = eval_real(sys, &parse_formula(text).unwrap());
        assert!(out.status.is_determined(), "{text}: {}", out.status);
        out.value
    }

    #[test]
    fn kinked_weak_box_values() {
        let sys = kinked();
        assert_eq!(value(&sys, "[*]p"), ray_below(q(0, 1)));
        assert!(value(&sys, "O[*]p").is_empty());
        assert!(value(&sys, "[*][*]p").is_empty());
        for f in ["[*]p -> O[*]p", "[*]O p -> O[*]p", "[*]p -> [*][*]p"] {
            assert_eq!(value(&sys, f), ray_above(q(0, 1)), "{f}");
        }
        assert_eq!(eval_real(&sys, &parse_formula("[*]p").unwrap()).status, Status::Extrapolated);
        assert!(value(&sys, "[]p").is_empty());
    }

    #[test]
    fn doubling_constant_domain_fails_at_zero() {
        let sys = doubling();
        let p = Formula::atom("p");
        let qq = Formula::atom("q");
        assert_eq!(value(&sys, "[]p"), ray_below(q(0, 1)));
        assert_eq!(value(&sys, "<>q"), ray_above(q(0, 1)));
        let zero = [q(0, 1)];
        assert_eq!(check_pointwise(&sys, &named::cd(&p, &qq), &zero).unwrap(), vec![false]);
        assert_eq!(check_pointwise(&sys, &named::bi(&p, &qq), &zero).unwrap(), vec![false]);
    }

    #[test]
    fn doubling_box_above_positive_threshold() {
        let map = PiecewiseAffineMap::affine(Affine::new(q(2, 1), q(0, 1)));
        let sys = system(map, &[("p", ray_above(q(3, 2)))]);
        let v = value(&sys, "[]p");
        assert!(v.contains(&q(2, 1)) && v.contains(&q(1000, 1)));
        assert_eq!(v, ray_above(q(3, 2)));
    }

    #[test]
    fn constant_map_fischer_servi() {
        let sys = constant();
        let p = Formula::atom("p");
        let qq = Formula::atom("q");
        let fs = named::fs_dia(&p, &qq);
        let pts = [q(-1, 1)];
        assert_eq!(check_pointwise(&sys, &fs, &pts).unwrap(), vec![false]);
        assert_eq!(check_pointwise(&sys, &translate_weak(&fs), &pts).unwrap(), vec![false]);
    }

    #[test]
    fn shift_diamond_is_undetermined() {
        let map = PiecewiseAffineMap::affine(Affine::new(q(1, 1), q(1, 1)));
        let sys = system(map, &[("p", ray_above(q(0, 1))), ("q", ray_below(q(0, 1)))]);
        let out = eval_real(&sys, &parse_formula("<>p").unwrap());
        assert!(!out.status.is_determined());
        assert!(check_pointwise(&sys, &parse_formula("<>p").unwrap(), &[q(0, 1)]).is_err());
        assert_eq!(value(&sys, "[]p"), ray_above(q(0, 1)));
        assert!(value(&sys, "[]q").is_empty());
        assert_eq!(value(&sys, "<>q"), ray_below(q(0, 1)));
    }

    #[test]
    fn bottom_is_nowhere() {
        let sys = kinked();
        assert_eq!(check_pointwise(&sys, &Formula::Bottom, &[q(0, 1), q(5, 3)]).unwrap(), vec![false, false]);
    }

    #[test]
    fn closed_valuations_are_rejected() {
        let map = PiecewiseAffineMap::affine(Affine::constant(q(0, 1)));
        let mut v = BTreeMap::new();
        v.insert("p".to_string(), IntervalSet::from_interval(Interval::point(q(0, 1))));
        assert!(matches!(RealSystem::new(map, v, Caps::default()), Err(RealError::NonOpenValuation { .. })));
    }
}
