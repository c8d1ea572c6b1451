use rayon::prelude::*;

use crate::formula::Formula;
use crate::hilbert::{self, LogicSpec, ProofVerdict};
use crate::parser::{content_lines, parse_formula, parse_interval_set, parse_rational, words, ParseError, SourceSpan};
use crate::poset::{eval, PosetModel, WorldSet};
use crate::realline::{eval_real, RealSystem};

use super::{Artifact, Corpus};

/// What a check expects of its entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// The formula fails exactly at the listed worlds.
    FalsifiedAt(Vec<String>),
    /// The formula holds everywhere.
    Valid,
    /// The extension is the given set (interval set or world list).
    Extension(String),
    /// The point (world or rational) lies outside the extension.
    Excludes(String),
    /// The point lies inside the extension.
    Includes(String),
    Continuous(bool),
    Open(bool),
    /// The derivation is accepted in the logic and proves the formula.
    Proves(String),
    /// The derivation is rejected in the logic.
    Rejected(String),
    /// The entry loads and validates.
    Loads,
}

/// One line of `suite.txt`: `id verb args [: formula]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub expectation: Expectation,
    pub formula: Option<Formula>,
    /// 1-based line in `suite.txt`.
    pub line: usize,
}

impl Check {
    pub fn describe(&self) -> String {
        let what = match &self.expectation {
            Expectation::FalsifiedAt(ws) => format!("falsified exactly at {{{}}}", ws.join(", ")),
            Expectation::Valid => "valid".into(),
            Expectation::Extension(s) => format!("extension {s}"),
            Expectation::Excludes(p) => format!("excludes {p}"),
            Expectation::Includes(p) => format!("includes {p}"),
            Expectation::Continuous(b) => format!("continuous = {b}"),
            Expectation::Open(b) => format!("open = {b}"),
            Expectation::Proves(l) => format!("accepted in {l}"),
            Expectation::Rejected(l) => format!("rejected in {l}"),
            Expectation::Loads => "loads".into(),
        };
        match &self.formula {
            Some(f) => format!("{}: {what}: {f}", self.id),
            None => format!("{}: {what}", self.id),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    pub detail: String,
}

fn flag(s: &str, span: SourceSpan) -> Result<bool, ParseError> {
    match s {
        "yes" | "true" => Ok(true),
        "no" | "false" => Ok(false),
        _ => Err(ParseError::new(span, format!("expected yes or no, found '{s}'"))),
    }
}

pub fn parse_suite(text: &str) -> Result<Vec<Check>, ParseError> {
    let mut out = Vec::new();
    for (i, (offset, line)) in content_lines(text).into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (head, formula) = match line.find(':') {
            Some(c) => {
                let f = parse_formula(&line[c + 1..]).map_err(|e| e.shifted(offset + c + 1))?;
                (&line[..c], Some(f))
            }
            None => (line, None),
        };
        let ws = words(head, offset);
        let span = SourceSpan::new(offset, offset + line.len());
        if ws.len() < 2 {
            return Err(ParseError::new(span, "expected 'id verb args [: formula]'"));
        }
        let args: Vec<&str> = ws[2..].iter().map(|w| w.0).collect();
        let rest = head[ws[1].1.end - offset..].trim().to_string();
        let one = || -> Result<String, ParseError> {
            match args[..] {
                [a] => Ok(a.to_string()),
                _ => Err(ParseError::new(ws[1].1, format!("'{}' takes one argument", ws[1].0))),
            }
        };
        let expectation = match ws[1].0 {
            "falsified-at" => Expectation::FalsifiedAt(args.iter().map(|s| s.to_string()).collect()),
            "valid" => Expectation::Valid,
            "extension" => Expectation::Extension(rest),
            "excludes" => Expectation::Excludes(one()?),
            "includes" => Expectation::Includes(one()?),
            "continuous" => Expectation::Continuous(flag(&one()?, ws[1].1)?),
            "open" => Expectation::Open(flag(&one()?, ws[1].1)?),
            "proves" => Expectation::Proves(one()?),
            "rejected" => Expectation::Rejected(one()?),
            "loads" => Expectation::Loads,
            other => return Err(ParseError::new(ws[1].1, format!("unknown verb '{other}'"))),
        };
        let needs_formula = matches!(
            expectation,
            Expectation::FalsifiedAt(_)
                | Expectation::Valid
                | Expectation::Extension(_)
                | Expectation::Excludes(_)
                | Expectation::Includes(_)
                | Expectation::Proves(_)
        );
        if needs_formula != formula.is_some() {
            let msg = if needs_formula { "this check needs ': formula'" } else { "this check takes no formula" };
            return Err(ParseError::new(span, msg));
        }
        out.push(Check { id: ws[0].0.to_string(), expectation, formula, line: i + 1 });
    }
    Ok(out)
}

fn world_set(model: &PosetModel, names: &[String]) -> Result<WorldSet, String> {
    names.iter().try_fold(WorldSet::EMPTY, |acc, n| {
        model.frame.world(n).map(|w| acc.with(w)).ok_or_else(|| format!("unknown world '{n}'"))
    })
}

fn run_poset(model: &PosetModel, check: &Check) -> Result<String, String> {
    let frame = &model.frame;
    let ext = match &check.formula {
        Some(f) => Some(eval(model, f).map_err(|e| e.to_string())?.set()),
        None => None,
    };
    let shown = |s: WorldSet| frame.format_set(s);
    let expect = |ok: bool, got: String| if ok { Ok(got) } else { Err(got) };
    match &check.expectation {
        Expectation::FalsifiedAt(ws) => {
            let fails = frame.all().difference(ext.unwrap());
            expect(fails == world_set(model, ws)?, format!("falsified at {}", shown(fails)))
        }
        Expectation::Valid => expect(ext.unwrap() == frame.all(), format!("extension {}", shown(ext.unwrap()))),
        Expectation::Extension(s) => {
            let names: Vec<String> = s
                .trim_matches(|c| c == '{' || c == '}')
                .split([',', ' '])
                .filter(|w| !w.is_empty())
                .map(String::from)
                .collect();
            expect(ext.unwrap() == world_set(model, &names)?, format!("extension {}", shown(ext.unwrap())))
        }
        Expectation::Excludes(w) | Expectation::Includes(w) => {
            let world = frame.world(w).ok_or_else(|| format!("unknown world '{w}'"))?;
            let inside = ext.unwrap().contains(world);
            let want = matches!(check.expectation, Expectation::Includes(_));
            expect(inside == want, format!("extension {}", shown(ext.unwrap())))
        }
        Expectation::Continuous(b) => {
            expect(frame.is_continuous() == *b, format!("continuous = {}", frame.is_continuous()))
        }
        Expectation::Open(b) => expect(frame.is_open() == *b, format!("open = {}", frame.is_open())),
        Expectation::Loads => Ok(format!("{} worlds", frame.len())),
        _ => Err("check does not apply to a poset model".into()),
    }
}

fn run_real(sys: &RealSystem, check: &Check) -> Result<String, String> {
    let outcome = check.formula.as_ref().map(|f| eval_real(sys, f));
    let expect = |ok: bool, got: String| if ok { Ok(got) } else { Err(got) };
    if let Some(o) = &outcome {
        if !o.status.is_determined() {
            return Err(format!("value {} is {}", o.value, o.status));
        }
    }
    let value = || outcome.as_ref().unwrap().value.clone();
    match &check.expectation {
        Expectation::Valid => expect(value().is_everything(), format!("extension {}", value())),
        Expectation::Extension(s) => {
            let want = parse_interval_set(s).map_err(|e| e.message)?;
            expect(value() == want, format!("extension {}", value()))
        }
        Expectation::Excludes(x) | Expectation::Includes(x) => {
            let point = parse_rational(x).ok_or_else(|| format!("'{x}' is not a rational"))?;
            let want = matches!(check.expectation, Expectation::Includes(_));
            expect(value().contains(&point) == want, format!("extension {}", value()))
        }
        Expectation::Continuous(b) => expect(*b, "piecewise-affine maps are continuous".into()),
        Expectation::Open(b) => expect(sys.map.is_open() == *b, format!("open = {}", sys.map.is_open())),
        Expectation::Loads => Ok(format!("map {}", sys.map)),
        _ => Err("check does not apply to a real system".into()),
    }
}

fn run_one(corpus: &Corpus, check: &Check) -> CheckResult {
    let outcome = match corpus.load(&check.id) {
        Err(e) => Err(e.to_string()),
        Ok(Artifact::PosetModel(m)) => run_poset(&m, check),
        Ok(Artifact::RealSystem(s)) => run_real(&s, check),
        Ok(Artifact::Derivation(d)) => match &check.expectation {
            Expectation::Proves(l) | Expectation::Rejected(l) => match LogicSpec::parse(l) {
                Err(e) => Err(e.to_string()),
                Ok(logic) => {
                    let verdict = hilbert::check(&d, &logic);
                    let ok = match (&check.expectation, &verdict) {
                        (Expectation::Proves(_), ProofVerdict::Accepted { theorem, .. }) => {
                            check.formula.as_ref() == Some(theorem)
                        }
                        (Expectation::Rejected(_), ProofVerdict::Rejected { .. }) => true,
                        _ => false,
                    };
                    if ok {
                        Ok(verdict.to_string())
                    } else {
                        Err(verdict.to_string())
                    }
                }
            },
            Expectation::Loads => Ok(format!("{} lines", d.lines.len())),
            _ => Err("check does not apply to a derivation".into()),
        },
        Ok(Artifact::Formulas(fs)) => match check.expectation {
            Expectation::Loads => Ok(format!("{} formulas", fs.len())),
            _ => Err("check does not apply to a formula list".into()),
        },
        Ok(Artifact::Edges(es)) => match check.expectation {
            Expectation::Loads => Ok(format!("{} edges", es.len())),
            _ => Err("check does not apply to an edge list".into()),
        },
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { check: check.clone(), passed, detail }
}

/// Runs every suite check whose entry id contains `filter`, plus a load
/// check for every matching entry the suite does not mention. Results come
/// back in suite order.
pub fn run_suite(corpus: &Corpus, filter: Option<&str>) -> Result<Vec<CheckResult>, super::CorpusError> {
    let keep = |id: &str| filter.is_none_or(|f| id.contains(f));
    let mut checks: Vec<Check> = corpus.suite()?.into_iter().filter(|c| keep(&c.id)).collect();
    for e in corpus.entries() {
        if keep(&e.id) && !checks.iter().any(|c| c.id == e.id) {
            checks.push(Check { id: e.id.clone(), expectation: Expectation::Loads, formula: None, line: 0 });
        }
    }
    Ok(checks.par_iter().map(|c| run_one(corpus, c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_lines() {
        let s = parse_suite(
            "fig4-fs falsified-at w : (<>p -> []q) -> [](p -> q)\n\
             fig4-fs open no\n\
             r-kinked extension (0, inf) : [*]p -> O[*]p\n\
             d-wh proves ITL.db : [](p -> O p) -> p -> []p\n",
        )
        .unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].expectation, Expectation::FalsifiedAt(vec!["w".into()]));
        assert_eq!(s[1].expectation, Expectation::Open(false));
        assert_eq!(s[2].expectation, Expectation::Extension("(0, inf)".into()));
        assert_eq!(s[3].line, 4);
        assert!(parse_suite("x valid\n").is_err());
        assert!(parse_suite("x open maybe\n").is_err());
        assert!(parse_suite("x frobnicate : p\n").is_err());
    }
}
