use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::formula::Formula;
use crate::parser::parse_formula;

use super::HilbertError;

/// Metavariable substitution.
pub type Subst = BTreeMap<String, Formula>;

/// The metavariables, in canonical order.
pub const METAVARIABLES: [&str; 3] = ["phi", "psi", "chi"];

/// Canonical spelling of a metavariable, accepting Greek aliases.
pub fn metavariable(name: &str) -> Option<&'static str> {
    match name {
        "phi" | "φ" => Some("phi"),
        "psi" | "ψ" => Some("psi"),
        "chi" | "χ" => Some("chi"),
        _ => None,
    }
}

/// An axiom schema. The atoms of `template` are its metavariables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub template: Formula,
}

impl Schema {
    fn new(name: &'static str, aliases: &'static [&'static str], text: &str) -> Self {
        let template = parse_formula(text).expect("schema text parses");
        debug_assert!(template.atoms().iter().all(|a| metavariable(a).is_some()));
        Schema { name, aliases, template }
    }

    pub fn metavariables(&self) -> Vec<String> {
        self.template.atoms().iter().map(|a| a.to_string()).collect()
    }

    pub fn answers_to(&self, name: &str) -> bool {
        self.name == name || self.aliases.contains(&name)
    }

    pub fn instantiate(&self, subst: &Subst) -> Result<Formula, HilbertError> {
        instantiate(&self.template, subst)
    }
}

/// Homomorphic substitution of metavariables.
pub fn instantiate(template: &Formula, subst: &Subst) -> Result<Formula, HilbertError> {
    for mv in template.atoms() {
        if !subst.contains_key(&*mv) {
            return Err(HilbertError::MissingMetavariable(mv.to_string()));
        }
    }
    Ok(template.substitute(&|a| subst.get(a).cloned()))
}

/// One-way matching of `template` against `f`, extending `subst`.
pub fn match_template(template: &Formula, f: &Formula, subst: &mut Subst) -> bool {
    match (template, f) {
        (Formula::Atom(mv), _) => match subst.get(&**mv) {
            Some(bound) => bound == f,
            None => {
                subst.insert(mv.to_string(), f.clone());
                true
            }
        },
        (Formula::Bottom, Formula::Bottom) => true,
        (Formula::And(a, b), Formula::And(c, d))
        | (Formula::Or(a, b), Formula::Or(c, d))
        | (Formula::Implies(a, b), Formula::Implies(c, d)) => {
            match_template(a, c, subst) && match_template(b, d, subst)
        }
        (Formula::Next(a), Formula::Next(b))
        | (Formula::Eventually(a), Formula::Eventually(b))
        | (Formula::StrongBox(a), Formula::StrongBox(b))
        | (Formula::WeakBox(a), Formula::WeakBox(b)) => match_template(a, b, subst),
        _ => false,
    }
}

/// Every schema known to the checker. The roman aliases follow the order
/// of the base axiom list, with `i` (all intuitionistic tautologies)
/// handled by the `ipc-taut` justification and the explicit IPC basis.
pub fn catalog() -> &'static [Schema] {
    static CATALOG: OnceLock<Vec<Schema>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        vec![
            Schema::new("nex-bot", &["ii"], "~O false"),
            Schema::new("nex-and", &["iii"], "O(phi & psi) <-> O phi & O psi"),
            Schema::new("nex-or", &["iv"], "O(phi | psi) <-> O phi | O psi"),
            Schema::new("k-nex", &["v"], "O(phi -> psi) -> O phi -> O psi"),
            Schema::new("k-box", &["vi"], "[](phi -> psi) -> []phi -> []psi"),
            Schema::new("k-dia", &["vii"], "[](phi -> psi) -> <>phi -> <>psi"),
            Schema::new("box-refl", &["viii"], "[]phi -> phi"),
            Schema::new("box-fix", &["ix"], "[]phi -> O[]phi"),
            Schema::new("dia-refl", &["x"], "phi -> <>phi"),
            Schema::new("dia-fix", &["xi"], "O<>phi -> <>phi"),
            Schema::new("ind-box", &["xii"], "[](phi -> O phi) -> phi -> []phi"),
            Schema::new("ind-dia", &["xiii"], "[](O phi -> phi) -> <>phi -> phi"),
            Schema::new("wh", &[], "[]phi -> []O phi"),
            Schema::new("fs-nex", &[], "(O phi -> O psi) -> O(phi -> psi)"),
            Schema::new("fs-dia", &[], "(<>phi -> []psi) -> [](phi -> psi)"),
            Schema::new("cd", &[], "[](phi | psi) -> []phi | <>psi"),
            Schema::new("cd-minus", &[], "[](~phi | phi) -> []~phi | <>phi"),
            Schema::new("bi", &[], "[](phi | psi) & [](O psi -> psi) -> []phi | psi"),
            Schema::new("cem", &[], "~O phi & O~~phi -> O psi | ~O psi"),
            Schema::new("ipc-k", &[], "phi -> psi -> phi"),
            Schema::new("ipc-s", &[], "(phi -> psi -> chi) -> (phi -> psi) -> phi -> chi"),
            Schema::new("ipc-and-i", &[], "phi -> psi -> phi & psi"),
            Schema::new("ipc-and-e1", &[], "phi & psi -> phi"),
            Schema::new("ipc-and-e2", &[], "phi & psi -> psi"),
            Schema::new("ipc-or-i1", &[], "phi -> phi | psi"),
            Schema::new("ipc-or-i2", &[], "psi -> phi | psi"),
            Schema::new("ipc-or-e", &[], "(phi -> chi) -> (psi -> chi) -> phi | psi -> chi"),
            Schema::new("ipc-efq", &[], "false -> phi"),
        ]
    })
}

/// Looks a schema up by name or alias.
pub fn schema(name: &str) -> Option<&'static Schema> {
    catalog().iter().find(|s| s.answers_to(name))
}

/// Names of the explicit IPC basis schemas.
pub const IPC_BASIS: [&str; 9] =
    ["ipc-k", "ipc-s", "ipc-and-i", "ipc-and-e1", "ipc-and-e2", "ipc-or-i1", "ipc-or-i2", "ipc-or-e", "ipc-efq"];

/// An inference rule given by premise and conclusion templates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: &'static str,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl Rule {
    fn new(name: &'static str, premises: &[&str], conclusion: &str) -> Self {
        Rule {
            name,
            premises: premises.iter().map(|p| parse_formula(p).unwrap()).collect(),
            conclusion: parse_formula(conclusion).unwrap(),
        }
    }

    /// Checks that `conclusion` follows from `premises` by this rule.
    pub fn applies(&self, premises: &[&Formula], conclusion: &Formula) -> Result<(), String> {
        if premises.len() != self.premises.len() {
            return Err(format!("{} takes {} premises, got {}", self.name, self.premises.len(), premises.len()));
        }
        let mut subst = Subst::new();
        for (k, (t, f)) in self.premises.iter().zip(premises).enumerate() {
            if !match_template(t, f, &mut subst) {
                return Err(format!("premise {} does not have the form {}", k + 1, t));
            }
        }
        if match_template(&self.conclusion, conclusion, &mut subst) {
            Ok(())
        } else {
            let expected = instantiate(&self.conclusion, &subst).expect("conclusion bound by premises");
            Err(format!("{} yields {}, not the stated formula", self.name, expected))
        }
    }
}

pub fn rules() -> &'static [Rule] {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    RULES.get_or_init(|| {
        vec![
            Rule::new("mp", &["phi", "phi -> psi"], "psi"),
            Rule::new("nec-next", &["phi"], "O phi"),
            Rule::new("nec-box", &["phi"], "[]phi"),
            Rule::new("mono-dia", &["phi -> psi"], "<>phi -> <>psi"),
            Rule::new("ind-dia-rule", &["O phi -> phi"], "<>phi -> phi"),
        ]
    })
}

pub fn rule(name: &str) -> Option<&'static Rule> {
    rules().iter().find(|r| r.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subst(pairs: &[(&str, &str)]) -> Subst {
        pairs.iter().map(|(k, v)| (k.to_string(), parse_formula(v).unwrap())).collect()
    }

    #[test]
    fn box_fix_instance() {
        let f = schema("ix").unwrap().instantiate(&subst(&[("phi", "p")])).unwrap();
        assert_eq!(f, parse_formula("[]p -> O[]p").unwrap());
    }

    #[test]
    fn wh_instance() {
        let f = schema("wh").unwrap().instantiate(&subst(&[("phi", "<>q")])).unwrap();
        assert_eq!(f, parse_formula("[]<>q -> []O<>q").unwrap());
    }

    #[test]
    fn cd_instance() {
        let f = schema("cd").unwrap().instantiate(&subst(&[("phi", "p"), ("psi", "q")])).unwrap();
        assert_eq!(f, parse_formula("[](p | q) -> []p | <>q").unwrap());
    }

    #[test]
    fn missing_metavariable() {
        let r = schema("cd").unwrap().instantiate(&subst(&[("phi", "p")]));
        assert_eq!(r, Err(HilbertError::MissingMetavariable("psi".into())));
    }

    #[test]
    fn templates_use_only_metavariables() {
        for s in catalog() {
            for a in s.template.atoms() {
                assert!(metavariable(&a).is_some(), "{}", s.name);
            }
        }
    }

    #[test]
    fn matching_is_consistent() {
        let t = parse_formula("phi -> phi").unwrap();
        let mut s = Subst::new();
        assert!(match_template(&t, &parse_formula("O p -> O p").unwrap(), &mut s));
        let mut s = Subst::new();
        assert!(!match_template(&t, &parse_formula("O p -> p").unwrap(), &mut s));
    }

    #[test]
    fn rule_conclusions_are_bound() {
        for r in rules() {
            let bound: Vec<String> = r.premises.iter().flat_map(|p| p.atoms()).map(|a| a.to_string()).collect();
            for a in r.conclusion.atoms() {
                assert!(bound.contains(&a.to_string()), "{}", r.name);
            }
        }
    }

    #[test]
    fn modus_ponens() {
        let r = rule("mp").unwrap();
        let p = parse_formula("p").unwrap();
        let pq = parse_formula("p -> q").unwrap();
        assert!(r.applies(&[&p, &pq], &parse_formula("q").unwrap()).is_ok());
        assert!(r.applies(&[&pq, &p], &parse_formula("q").unwrap()).is_err());
    }
}
