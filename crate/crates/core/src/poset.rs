//! Finite dynamic posets under the up-set topology and exact model checking
//! over them.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{subformulas, Atom, Formula};

/// Largest carrier a [`WorldSet`] can represent.
pub const MAX_WORLDS: usize = 64;

/// A set of worlds of one carrier, as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct WorldSet(pub u64);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            WorldSet(u64::MAX)
        } else {
            WorldSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(w: usize) -> Self {
        WorldSet(1 << w)
    }

    pub fn from_worlds<I: IntoIterator<Item = usize>>(ws: I) -> Self {
        ws.into_iter().fold(WorldSet::EMPTY, |acc, w| acc.with(w))
    }

    pub fn contains(self, w: usize) -> bool {
        self.0 >> w & 1 == 1
    }

    pub fn with(self, w: usize) -> Self {
        WorldSet(self.0 | 1 << w)
    }

    pub fn union(self, o: Self) -> Self {
        WorldSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        WorldSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        WorldSet(self.0 & !o.0)
    }

    pub fn complement(self, n: usize) -> Self {
        WorldSet(!self.0 & WorldSet::full(n).0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w)
            }
        })
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("at least one world required")]
    EmptyCarrier,
    #[error("too many worlds: {0} (at most {MAX_WORLDS})")]
    TooManyWorlds(usize),
    #[error("duplicate world name '{0}'")]
    DuplicateWorld(String),
    #[error("malformed order: {0}")]
    MalformedOrder(String),
    #[error("step map must have exactly one successor for each of the {expected} worlds, got {got}")]
    StepNotTotal { expected: usize, got: usize },
    #[error("world index {0} out of range")]
    WorldOutOfRange(usize),
    #[error("valuation of '{atom}' is not upward closed: {world} is in it but {above} is not")]
    NotUpSet { atom: String, world: String, above: String },
    #[error("the step map is not continuous: {w} <= {v} but S({w}) = {sw} is not below S({v}) = {sv}")]
    ContinuityRequired { w: String, v: String, sw: String, sv: String },
    #[error("morphism domain is not invariant under the step map: S({world}) = {image} leaves it")]
    DomainNotInvariant { world: String, image: String },
    #[error("world map has length {got}, expected {expected}")]
    MapLength { expected: usize, got: usize },
}

/// Result of checking continuity and openness of the step map.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Diagnostics {
    pub continuous: bool,
    pub open: bool,
    /// Pairs `w <= v` with `S(w)` not below `S(v)`.
    pub continuity_violations: Vec<(usize, usize)>,
    /// Pairs `(w, v)` with `S(w) <= v` but no `w' >= w` mapped to `v`.
    pub openness_violations: Vec<(usize, usize)>,
}

/// A finite poset with a total step map.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DynamicPoset {
    names: Vec<String>,
    up: Vec<WorldSet>,
    down: Vec<WorldSet>,
    step: Vec<usize>,
    continuous: bool,
    open: bool,
}

impl fmt::Debug for DynamicPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicPoset")
            .field("worlds", &self.names)
            .field("up", &self.up)
            .field("step", &self.step)
            .finish()
    }
}

impl DynamicPoset {
    /// Builds and validates a dynamic poset. `order` lists pairs `(a, b)`
    /// meaning `a <= b`; reflexive pairs are implied, transitivity is not.
    pub fn new(names: Vec<String>, order: &[(usize, usize)], step: Vec<usize>) -> Result<Self, ModelError> {
        let n = names.len();
        if n == 0 {
            return Err(ModelError::EmptyCarrier);
        }
        if n > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(n));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(ModelError::DuplicateWorld(a.clone()));
            }
        }
        if step.len() != n {
            return Err(ModelError::StepNotTotal { expected: n, got: step.len() });
        }
        if let Some(&bad) = step.iter().find(|&&s| s >= n) {
            return Err(ModelError::WorldOutOfRange(bad));
        }
        let mut up: Vec<WorldSet> = (0..n).map(WorldSet::singleton).collect();
        for &(a, b) in order {
            if a >= n || b >= n {
                return Err(ModelError::WorldOutOfRange(a.max(b)));
            }
            up[a] = up[a].with(b);
        }
        for a in 0..n {
            for b in up[a].iter() {
                if a != b && up[b].contains(a) {
                    return Err(ModelError::MalformedOrder(format!(
                        "antisymmetry fails: {} <= {} and {} <= {}",
                        names[a], names[b], names[b], names[a]
                    )));
                }
                for c in up[b].iter() {
                    if !up[a].contains(c) {
                        return Err(ModelError::MalformedOrder(format!(
                            "transitivity fails: {} <= {} and {} <= {} but not {} <= {}",
                            names[a], names[b], names[b], names[c], names[a], names[c]
                        )));
                    }
                }
            }
        }
        Ok(Self::from_up_sets(names, up, step))
    }

    /// Builds from already validated principal up-sets.
    pub(crate) fn from_up_sets(names: Vec<String>, up: Vec<WorldSet>, step: Vec<usize>) -> Self {
        let n = names.len();
        let mut down = vec![WorldSet::EMPTY; n];
        for (a, ua) in up.iter().enumerate() {
            for b in ua.iter() {
                down[b] = down[b].with(a);
            }
        }
        let mut poset = DynamicPoset { names, up, down, step, continuous: false, open: false };
        poset.continuous = poset.first_continuity_violation().is_none();
        poset.open = poset.continuous && poset.openness_violations(true).is_empty();
        poset
    }

    /// Worlds named `w0`, `w1`, ...
    pub fn default_names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i}")).collect()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn world(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn all(&self) -> WorldSet {
        WorldSet::full(self.len())
    }

    /// `S(w)`.
    pub fn step(&self, w: usize) -> usize {
        self.step[w]
    }

    pub fn step_map(&self) -> &[usize] {
        &self.step
    }

    /// The principal up-set of `w`.
    pub fn up(&self, w: usize) -> WorldSet {
        self.up[w]
    }

    pub fn down(&self, w: usize) -> WorldSet {
        self.down[w]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    /// Non-reflexive order pairs `(a, b)` with `a <= b`.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in self.up[a].iter() {
                if a != b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    fn first_continuity_violation(&self) -> Option<(usize, usize)> {
        for w in 0..self.len() {
            for v in self.up[w].iter() {
                if !self.leq(self.step[w], self.step[v]) {
                    return Some((w, v));
                }
            }
        }
        None
    }

    fn openness_violations(&self, first_only: bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for w in 0..self.len() {
            let reachable = self.image(self.up[w]);
            let missing = self.up[self.step[w]].difference(reachable);
            for v in missing.iter() {
                out.push((w, v));
                if first_only {
                    return out;
                }
            }
        }
        out
    }

    /// Continuity and openness of the step map with every violating pair.
    pub fn validate(&self) -> Diagnostics {
        let mut continuity_violations = Vec::new();
        for w in 0..self.len() {
            for v in self.up[w].iter() {
                if !self.leq(self.step[w], self.step[v]) {
                    continuity_violations.push((w, v));
                }
            }
        }
        let openness_violations = self.openness_violations(false);
        Diagnostics {
            continuous: continuity_violations.is_empty(),
            open: continuity_violations.is_empty() && openness_violations.is_empty(),
            continuity_violations,
            openness_violations,
        }
    }

    /// `{w : S(w) in a}`.
    pub fn preimage(&self, a: WorldSet) -> WorldSet {
        let mut out = 0u64;
        for (w, &s) in self.step.iter().enumerate() {
            out |= ((a.0 >> s) & 1) << w;
        }
        WorldSet(out)
    }

    /// `S[a]`.
    pub fn image(&self, a: WorldSet) -> WorldSet {
        a.iter().fold(WorldSet::EMPTY, |acc, w| acc.with(self.step[w]))
    }

    /// `{w : up(w) is contained in a}`, the largest up-set inside `a`.
    pub fn interior_set(&self, a: WorldSet) -> WorldSet {
        let mut out = 0u64;
        for (w, u) in self.up.iter().enumerate() {
            if u.is_subset(a) {
                out |= 1 << w;
            }
        }
        WorldSet(out)
    }

    /// Smallest up-set containing `a`.
    pub fn up_closure(&self, a: WorldSet) -> WorldSet {
        a.iter().fold(WorldSet::EMPTY, |acc, w| acc.union(self.up[w]))
    }

    pub fn is_up_set(&self, a: WorldSet) -> bool {
        a.iter().all(|w| self.up[w].is_subset(a))
    }

    /// Every up-set of the carrier, in increasing order of bit mask.
    pub fn up_sets(&self) -> Vec<WorldSet> {
        let n = self.len();
        assert!(n <= 20, "up-set enumeration is meant for small carriers");
        (0..1u64 << n).map(WorldSet).filter(|&a| self.is_up_set(a)).collect()
    }

    pub fn names_of(&self, a: WorldSet) -> Vec<&str> {
        a.iter().map(|w| self.name(w)).collect()
    }

    /// `{a, b}` rendering of a world set.
    pub fn format_set(&self, a: WorldSet) -> String {
        format!("{{{}}}", self.names_of(a).join(", "))
    }

    /// Error describing the first continuity failure, if any.
    pub fn require_continuous(&self) -> Result<(), ModelError> {
        match self.first_continuity_violation() {
            None => Ok(()),
            Some((w, v)) => Err(ModelError::ContinuityRequired {
                w: self.names[w].clone(),
                v: self.names[v].clone(),
                sw: self.names[self.step[w]].clone(),
                sv: self.names[self.step[v]].clone(),
            }),
        }
    }
}

/// The free-standing form of [`DynamicPoset::validate`].
pub fn validate(poset: &DynamicPoset) -> Diagnostics {
    poset.validate()
}

/// An upward closed set of worlds of some carrier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug, PartialOrd, Ord)]
pub struct UpSet(WorldSet);

impl UpSet {
    pub fn new(poset: &DynamicPoset, set: WorldSet) -> Option<Self> {
        poset.is_up_set(set).then_some(UpSet(set))
    }

    pub(crate) fn trusted(poset: &DynamicPoset, set: WorldSet) -> Self {
        debug_assert!(poset.is_up_set(set), "not an up-set: {set:?}");
        UpSet(set)
    }

    pub fn set(self) -> WorldSet {
        self.0
    }

    pub fn contains(self, w: usize) -> bool {
        self.0.contains(w)
    }
}

/// `{w : up(w) is contained in a}`.
pub fn interior(poset: &DynamicPoset, a: WorldSet) -> UpSet {
    UpSet(poset.interior_set(a))
}

/// Assignment of up-sets to atoms. Atoms without an entry denote the empty
/// set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Valuation(BTreeMap<String, UpSet>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, atom: &str) -> UpSet {
        self.0.get(atom).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &UpSet)> {
        self.0.iter()
    }

    pub fn insert(&mut self, atom: &str, set: UpSet) {
        self.0.insert(atom.to_string(), set);
    }

    pub fn atoms(&self) -> Vec<&str> {
        self.0.keys().map(String::as_str).collect()
    }
}

/// A dynamic poset together with a valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PosetModel {
    pub frame: DynamicPoset,
    pub valuation: Valuation,
}

impl PosetModel {
    /// Validates that every assigned set is upward closed.
    pub fn new(frame: DynamicPoset, assignment: BTreeMap<String, WorldSet>) -> Result<Self, ModelError> {
        let mut valuation = Valuation::new();
        for (atom, set) in assignment {
            if let Some(w) = set.iter().find(|&w| !frame.up(w).is_subset(set)) {
                let above = frame.up(w).difference(set).iter().next().unwrap();
                return Err(ModelError::NotUpSet {
                    atom,
                    world: frame.name(w).to_string(),
                    above: frame.name(above).to_string(),
                });
            }
            valuation.insert(&atom, UpSet(set));
        }
        Ok(Self { frame, valuation })
    }

    pub fn eval(&self, f: &Formula) -> Result<UpSet, ModelError> {
        eval(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Bottom,
    Atom(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Next(usize),
    Eventually(usize),
    StrongBox(usize),
    WeakBox(usize),
}

/// A formula flattened into its subformula DAG, for repeated evaluation on
/// many models.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    subformulas: Vec<Formula>,
    atoms: Vec<Atom>,
}

impl CompiledFormula {
    pub fn new(f: &Formula) -> Self {
        let subs = subformulas(f);
        let atoms = f.atoms();
        let index = |g: &Formula| subs.iter().position(|h| h == g).expect("child precedes parent");
        let nodes = subs
            .iter()
            .map(|g| match g {
                Formula::Bottom => Node::Bottom,
                Formula::Atom(a) => Node::Atom(atoms.iter().position(|b| b == a).unwrap()),
                Formula::And(l, r) => Node::And(index(l), index(r)),
                Formula::Or(l, r) => Node::Or(index(l), index(r)),
                Formula::Implies(l, r) => Node::Implies(index(l), index(r)),
                Formula::Next(h) => Node::Next(index(h)),
                Formula::Eventually(h) => Node::Eventually(index(h)),
                Formula::StrongBox(h) => Node::StrongBox(index(h)),
                Formula::WeakBox(h) => Node::WeakBox(index(h)),
            })
            .collect();
        Self { nodes, subformulas: subs, atoms }
    }

    /// Atoms in the order expected by [`CompiledFormula::eval_with`].
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn subformulas(&self) -> &[Formula] {
        &self.subformulas
    }

    /// Extensions of every subformula. The frame must be continuous and
    /// `atom_values` must be up-sets listed in the order of [`Self::atoms`].
    pub fn eval_with(&self, frame: &DynamicPoset, atom_values: &[WorldSet]) -> Vec<WorldSet> {
        let n = frame.len();
        let all = frame.all();
        let mut ext: Vec<WorldSet> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let value = match *node {
                Node::Bottom => WorldSet::EMPTY,
                Node::Atom(i) => atom_values[i],
                Node::And(l, r) => ext[l].intersection(ext[r]),
                Node::Or(l, r) => ext[l].union(ext[r]),
                Node::Implies(l, r) => frame.interior_set(ext[l].complement(n).union(ext[r])),
                Node::Next(h) => frame.preimage(ext[h]),
                Node::Eventually(h) => {
                    let mut u = ext[h];
                    let mut rounds = 0;
                    loop {
                        let next = u.union(frame.preimage(u));
                        if next == u {
                            break;
                        }
                        u = next;
                        rounds += 1;
                    }
                    debug_assert!(rounds <= n);
                    u
                }
                Node::StrongBox(h) => {
                    // greatest fixed point of V -> int(T & S^-1 V), from T
                    let target = ext[h];
                    let mut v = frame.interior_set(target);
                    let mut rounds = 0;
                    loop {
                        let next = frame.interior_set(target.intersection(frame.preimage(v)));
                        if next == v {
                            break;
                        }
                        v = next;
                        rounds += 1;
                    }
                    debug_assert!(rounds <= n);
                    v
                }
                Node::WeakBox(h) => {
                    let target = ext[h];
                    let mut v = target;
                    let mut rounds = 0;
                    loop {
                        let next = target.intersection(frame.preimage(v));
                        if next == v {
                            break;
                        }
                        v = next;
                        rounds += 1;
                    }
                    debug_assert!(rounds <= n);
                    frame.interior_set(v)
                }
            };
            debug_assert!(value.is_subset(all));
            debug_assert!(frame.is_up_set(value), "extension of {:?} is not an up-set", node);
            ext.push(value);
        }
        ext
    }

    pub fn eval_root(&self, frame: &DynamicPoset, atom_values: &[WorldSet]) -> WorldSet {
        *self.eval_with(frame, atom_values).last().unwrap()
    }

    /// Atom values looked up in a valuation.
    pub fn atom_values(&self, valuation: &Valuation) -> Vec<WorldSet> {
        self.atoms.iter().map(|a| valuation.get(a).set()).collect()
    }
}

/// Exact extension of `f` in `model`.
pub fn eval(model: &PosetModel, f: &Formula) -> Result<UpSet, ModelError> {
    model.frame.require_continuous()?;
    let compiled = CompiledFormula::new(f);
    let values = compiled.atom_values(&model.valuation);
    Ok(UpSet::trusted(&model.frame, compiled.eval_root(&model.frame, &values)))
}

/// Extensions of every subformula of `f`, children first.
pub fn eval_all(model: &PosetModel, f: &Formula) -> Result<Vec<(Formula, UpSet)>, ModelError> {
    model.frame.require_continuous()?;
    let compiled = CompiledFormula::new(f);
    let values = compiled.atom_values(&model.valuation);
    let ext = compiled.eval_with(&model.frame, &values);
    Ok(compiled.subformulas.iter().cloned().zip(ext.into_iter().map(|s| UpSet::trusted(&model.frame, s))).collect())
}

/// Worlds whose whole orbit stays inside the extension of `f`.
pub fn eval_box_by_orbit(model: &PosetModel, f: &Formula) -> Result<UpSet, ModelError> {
    let target = eval(model, f)?.set();
    let frame = &model.frame;
    let mut out = WorldSet::EMPTY;
    for w in 0..frame.len() {
        let mut seen = WorldSet::EMPTY;
        let mut x = w;
        let mut inside = true;
        while !seen.contains(x) {
            if !target.contains(x) {
                inside = false;
                break;
            }
            seen = seen.with(x);
            x = frame.step(x);
        }
        if inside {
            out = out.with(w);
        }
    }
    Ok(UpSet::trusted(frame, out))
}

/// Failed conditions of a candidate dynamic morphism, with witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MorphismReport {
    /// `w <= v` in the domain with `f(w)` not below `f(v)`.
    pub monotonicity: Vec<(usize, usize)>,
    /// `(w, v)` with `f(w) <= v` in the target but no `w' >= w` in the domain
    /// mapped to `v`.
    pub lift: Vec<(usize, usize)>,
    /// `w` with `f(S w) != S(f w)`.
    pub commutation: Vec<usize>,
}

impl MorphismReport {
    pub fn is_morphism(&self) -> bool {
        self.monotonicity.is_empty() && self.lift.is_empty() && self.commutation.is_empty()
    }
}

/// Checks that `map`, restricted to the invariant up-set `domain` of `src`,
/// is an interior map into `dst` commuting with the step maps. Entries of
/// `map` outside `domain` are ignored.
pub fn check_morphism(
    src: &DynamicPoset,
    dst: &DynamicPoset,
    domain: UpSet,
    map: &[usize],
) -> Result<MorphismReport, ModelError> {
    if map.len() != src.len() {
        return Err(ModelError::MapLength { expected: src.len(), got: map.len() });
    }
    let dom = domain.set();
    for w in dom.iter() {
        if map[w] >= dst.len() {
            return Err(ModelError::WorldOutOfRange(map[w]));
        }
        if !dom.contains(src.step(w)) {
            return Err(ModelError::DomainNotInvariant {
                world: src.name(w).to_string(),
                image: src.name(src.step(w)).to_string(),
            });
        }
    }
    let mut report = MorphismReport::default();
    for w in dom.iter() {
        for v in src.up(w).iter() {
            if !dst.leq(map[w], map[v]) {
                report.monotonicity.push((w, v));
            }
        }
        let reached = src.up(w).iter().fold(WorldSet::EMPTY, |acc, x| acc.with(map[x]));
        for v in dst.up(map[w]).difference(reached).iter() {
            report.lift.push((w, v));
        }
        if map[src.step(w)] != dst.step(map[w]) {
            report.commutation.push(w);
        }
    }
    Ok(report)
}
