//! Abstract syntax of the temporal-intuitionistic language.
//!
//! Formulas are immutable trees with shared children. Negation and the
//! biconditional are not primitive: [`Formula::not`] builds `f -> false` and
//! [`Formula::iff`] builds the conjunction of both implications.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

/// Atom names.
pub type Atom = Arc<str>;

/// A formula of the full language with tenses `O`, `<>`, `[]` and `[*]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bottom,
    Atom(Atom),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Next(Arc<Formula>),
    Eventually(Arc<Formula>),
    StrongBox(Arc<Formula>),
    WeakBox(Arc<Formula>),
}

/// The three optional tenses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tense {
    Eventually,
    StrongBox,
    WeakBox,
}

impl Tense {
    pub fn symbol(self) -> &'static str {
        match self {
            Tense::Eventually => "<>",
            Tense::StrongBox => "[]",
            Tense::WeakBox => "[*]",
        }
    }
}

/// A sub-language given by the set of permitted optional tenses; `O` is
/// always permitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct LanguageFragment {
    pub eventually: bool,
    pub strong_box: bool,
    pub weak_box: bool,
}

impl LanguageFragment {
    pub const NEXT_ONLY: Self = Self { eventually: false, strong_box: false, weak_box: false };
    pub const DIAMOND_BOX: Self = Self { eventually: true, strong_box: true, weak_box: false };
    pub const DIAMOND_WEAK: Self = Self { eventually: true, strong_box: false, weak_box: true };
    pub const BOX: Self = Self { eventually: false, strong_box: true, weak_box: false };
    pub const WEAK: Self = Self { eventually: false, strong_box: false, weak_box: true };
    pub const DIAMOND: Self = Self { eventually: true, strong_box: false, weak_box: false };
    pub const FULL: Self = Self { eventually: true, strong_box: true, weak_box: true };

    pub fn from_tenses<I: IntoIterator<Item = Tense>>(tenses: I) -> Self {
        let mut frag = Self::NEXT_ONLY;
        for t in tenses {
            frag.insert(t);
        }
        frag
    }

    pub fn insert(&mut self, t: Tense) {
        match t {
            Tense::Eventually => self.eventually = true,
            Tense::StrongBox => self.strong_box = true,
            Tense::WeakBox => self.weak_box = true,
        }
    }

    pub fn contains(&self, t: Tense) -> bool {
        match t {
            Tense::Eventually => self.eventually,
            Tense::StrongBox => self.strong_box,
            Tense::WeakBox => self.weak_box,
        }
    }

    pub fn tenses(&self) -> Vec<Tense> {
        [Tense::Eventually, Tense::StrongBox, Tense::WeakBox].into_iter().filter(|t| self.contains(*t)).collect()
    }

    /// Conventional name such as `L_<>[]`.
    pub fn name(&self) -> String {
        let mut s = String::from("L_O");
        for t in self.tenses() {
            s.push_str(t.symbol());
        }
        s
    }
}

impl Formula {
    pub fn bottom() -> Self {
        Formula::Bottom
    }

    /// `false -> false`.
    pub fn top() -> Self {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::implies(f, Formula::Bottom)
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::and(Formula::implies(l.clone(), r.clone()), Formula::implies(r, l))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Arc::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Arc::new(f))
    }

    pub fn strong_box(f: Formula) -> Self {
        Formula::StrongBox(Arc::new(f))
    }

    pub fn weak_box(f: Formula) -> Self {
        Formula::WeakBox(Arc::new(f))
    }

    /// The tense at the root, if any.
    pub fn tense(&self) -> Option<Tense> {
        match self {
            Formula::Eventually(_) => Some(Tense::Eventually),
            Formula::StrongBox(_) => Some(Tense::StrongBox),
            Formula::WeakBox(_) => Some(Tense::WeakBox),
            _ => None,
        }
    }

    /// True for `O`, `<>`, `[]` and `[*]` at the root.
    pub fn is_tensed(&self) -> bool {
        matches!(self, Formula::Next(_) | Formula::Eventually(_) | Formula::StrongBox(_) | Formula::WeakBox(_))
    }

    /// Immediate children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Bottom | Formula::Atom(_) => vec![],
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => vec![l, r],
            Formula::Next(f) | Formula::Eventually(f) | Formula::StrongBox(f) | Formula::WeakBox(f) => {
                vec![f]
            }
        }
    }

    /// If this is `f -> false`, returns `f`.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(l, r) if **r == Formula::Bottom => Some(l),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Atoms in first-occurrence order, without repetition.
    pub fn atoms(&self) -> Vec<Atom> {
        fn go(f: &Formula, seen: &mut HashSet<Atom>, out: &mut Vec<Atom>) {
            if let Formula::Atom(a) = f {
                if seen.insert(a.clone()) {
                    out.push(a.clone());
                }
            }
            for c in f.children() {
                go(c, seen, out);
            }
        }
        let mut out = Vec::new();
        go(self, &mut HashSet::new(), &mut out);
        out
    }

    /// Optional tenses occurring anywhere in the formula.
    pub fn tenses(&self) -> BTreeSet<Tense> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| {
            if let Some(t) = g.tense() {
                out.insert(t);
            }
        });
        out
    }

    pub fn contains_tense(&self, t: Tense) -> bool {
        self.tenses().contains(&t)
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Rebuilds the tree bottom-up, letting `f` rewrite each rebuilt node.
    pub fn map_bottom_up<F: Fn(Formula) -> Formula + Copy>(&self, f: F) -> Formula {
        let rebuilt = match self {
            Formula::Bottom | Formula::Atom(_) => self.clone(),
            Formula::And(l, r) => Formula::and(l.map_bottom_up(f), r.map_bottom_up(f)),
            Formula::Or(l, r) => Formula::or(l.map_bottom_up(f), r.map_bottom_up(f)),
            Formula::Implies(l, r) => Formula::implies(l.map_bottom_up(f), r.map_bottom_up(f)),
            Formula::Next(g) => Formula::next(g.map_bottom_up(f)),
            Formula::Eventually(g) => Formula::eventually(g.map_bottom_up(f)),
            Formula::StrongBox(g) => Formula::strong_box(g.map_bottom_up(f)),
            Formula::WeakBox(g) => Formula::weak_box(g.map_bottom_up(f)),
        };
        f(rebuilt)
    }

    /// Uniform replacement of atoms; atoms for which `sub` returns `None`
    /// are kept.
    pub fn substitute<F: Fn(&str) -> Option<Formula>>(&self, sub: &F) -> Formula {
        match self {
            Formula::Bottom => Formula::Bottom,
            Formula::Atom(a) => sub(a).unwrap_or_else(|| self.clone()),
            Formula::And(l, r) => Formula::and(l.substitute(sub), r.substitute(sub)),
            Formula::Or(l, r) => Formula::or(l.substitute(sub), r.substitute(sub)),
            Formula::Implies(l, r) => Formula::implies(l.substitute(sub), r.substitute(sub)),
            Formula::Next(g) => Formula::next(g.substitute(sub)),
            Formula::Eventually(g) => Formula::eventually(g.substitute(sub)),
            Formula::StrongBox(g) => Formula::strong_box(g.substitute(sub)),
            Formula::WeakBox(g) => Formula::weak_box(g.substitute(sub)),
        }
    }
}

/// Every distinct subformula, children before parents. Ties are broken by
/// first completion in a left-to-right post-order walk, so the order is
/// deterministic.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    fn go(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
        if seen.contains(f) {
            return;
        }
        for c in f.children() {
            go(c, seen, out);
        }
        seen.insert(f.clone());
        out.push(f.clone());
    }
    let mut out = Vec::new();
    go(f, &mut HashSet::new(), &mut out);
    out
}

/// Replaces every `[]` by `[*]`.
pub fn translate_weak(f: &Formula) -> Formula {
    f.map_bottom_up(|g| match g {
        Formula::StrongBox(h) => Formula::WeakBox(h),
        other => other,
    })
}

/// Replaces every `[*]` by `[]`.
pub fn translate_strong(f: &Formula) -> Formula {
    f.map_bottom_up(|g| match g {
        Formula::WeakBox(h) => Formula::StrongBox(h),
        other => other,
    })
}

/// True iff every tense of `f` other than `O` is permitted by `frag`.
pub fn in_fragment(f: &Formula, frag: LanguageFragment) -> bool {
    f.tenses().into_iter().all(|t| frag.contains(t))
}

/// The named formulas used throughout the toolkit, instantiated at
/// arbitrary arguments.
pub mod named {
    use super::Formula;

    /// `[]p -> []O p`
    pub fn wh(p: &Formula) -> Formula {
        Formula::implies(Formula::strong_box(p.clone()), Formula::strong_box(Formula::next(p.clone())))
    }

    /// `(O p -> O q) -> O(p -> q)`
    pub fn fs_next(p: &Formula, q: &Formula) -> Formula {
        Formula::implies(
            Formula::implies(Formula::next(p.clone()), Formula::next(q.clone())),
            Formula::next(Formula::implies(p.clone(), q.clone())),
        )
    }

    /// `(<>p -> []q) -> [](p -> q)`
    pub fn fs_dia(p: &Formula, q: &Formula) -> Formula {
        Formula::implies(
            Formula::implies(Formula::eventually(p.clone()), Formula::strong_box(q.clone())),
            Formula::strong_box(Formula::implies(p.clone(), q.clone())),
        )
    }

    /// `[](p | q) -> []p | <>q`
    pub fn cd(p: &Formula, q: &Formula) -> Formula {
        Formula::implies(
            Formula::strong_box(Formula::or(p.clone(), q.clone())),
            Formula::or(Formula::strong_box(p.clone()), Formula::eventually(q.clone())),
        )
    }

    /// `[](~p | p) -> []~p | <>p`
    pub fn cd_minus(p: &Formula) -> Formula {
        cd(&Formula::not(p.clone()), p)
    }

    /// `[](p | q) & [](O q -> q) -> []p | q`
    pub fn bi(p: &Formula, q: &Formula) -> Formula {
        Formula::implies(
            Formula::and(
                Formula::strong_box(Formula::or(p.clone(), q.clone())),
                Formula::strong_box(Formula::implies(Formula::next(q.clone()), q.clone())),
            ),
            Formula::or(Formula::strong_box(p.clone()), q.clone()),
        )
    }

    /// `~O p & O~~p -> O q | ~O q`
    pub fn cem(p: &Formula, q: &Formula) -> Formula {
        Formula::implies(
            Formula::and(Formula::not(Formula::next(p.clone())), Formula::next(Formula::not(Formula::not(p.clone())))),
            Formula::or(Formula::next(q.clone()), Formula::not(Formula::next(q.clone()))),
        )
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({})", crate::parser::print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn subformulas_of_atom() {
        assert_eq!(subformulas(&p()), vec![p()]);
    }

    #[test]
    fn subformulas_of_box_implication() {
        let f = Formula::strong_box(Formula::implies(p(), Formula::next(p())));
        let subs = subformulas(&f);
        assert_eq!(subs.len(), 4);
        assert_eq!(subs[0], p());
        assert_eq!(subs[1], Formula::next(p()));
        assert_eq!(subs[3], f);
    }

    #[test]
    fn subformulas_of_cd_counted_by_hand() {
        // p, q, p|q, [](p|q), []p, <>q, []p|<>q, and the whole implication
        let subs = subformulas(&named::cd(&p(), &q()));
        assert_eq!(subs.len(), 8);
    }

    #[test]
    fn subformula_order_is_topological() {
        let f = named::bi(&p(), &Formula::eventually(q()));
        let subs = subformulas(&f);
        for (i, g) in subs.iter().enumerate() {
            for c in g.children() {
                let j = subs.iter().position(|h| h == c).unwrap();
                assert!(j < i);
            }
        }
    }

    #[test]
    fn weak_translation() {
        assert_eq!(translate_weak(&Formula::strong_box(p())), Formula::weak_box(p()));
        let f = Formula::implies(Formula::strong_box(p()), Formula::next(Formula::strong_box(p())));
        let g = Formula::implies(Formula::weak_box(p()), Formula::next(Formula::weak_box(p())));
        assert_eq!(translate_weak(&f), g);
        assert_eq!(translate_strong(&g), f);
    }

    #[test]
    fn fragments() {
        let frag = LanguageFragment::from_tenses([Tense::Eventually]);
        assert!(in_fragment(&Formula::eventually(p()), frag));
        assert!(!in_fragment(&Formula::strong_box(p()), frag));
        assert!(!in_fragment(&named::cd(&p(), &q()), LanguageFragment::BOX));
        assert!(in_fragment(&Formula::next(p()), LanguageFragment::NEXT_ONLY));
    }

    #[test]
    fn negation_and_iff_are_derived() {
        assert_eq!(Formula::not(p()), Formula::implies(p(), Formula::Bottom));
        assert_eq!(Formula::iff(p(), q()), Formula::and(Formula::implies(p(), q()), Formula::implies(q(), p())));
    }

    #[test]
    fn atoms_in_first_occurrence_order() {
        let f = Formula::or(q(), Formula::and(p(), q()));
        let names: Vec<String> = f.atoms().iter().map(|a| a.to_string()).collect();
        assert_eq!(names, vec!["q", "p"]);
    }
}
