//! One line per acceptance criterion. Runs without the test harness so
//! that every criterion reports even when an earlier one fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use itl_core::corpus::{Corpus, EntryKind, Expectation};
use itl_core::formula::{named, translate_weak, Formula};
use itl_core::hilbert::{check, LogicSpec};
use itl_core::parser::{parse_derivation, parse_formula, parse_interval_set, parse_rational, print_formula};
use itl_core::poset::{eval, eval_box_by_orbit};
use itl_core::realline::random::{interval_set, open_set, piecewise_map};
use itl_core::realline::{eval_real, q, IntervalSet, Rational, RealSystem};
use itl_core::search::random::random_model;
use itl_core::search::{enumerate_models, soundness_sweep, validity, ClassKind, SemanticClass, Verdict};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus() -> Result<Corpus, String> {
    Corpus::open_default().map_err(|e| e.to_string())
}

fn f(text: &str) -> Formula {
    parse_formula(text).unwrap_or_else(|e| panic!("{text}: {}", e.message))
}

fn atoms() -> (Formula, Formula) {
    (Formula::atom("p"), Formula::atom("q"))
}

/// Runs the `itl` binary and returns its exit code and standard output.
fn itl(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_itl")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn path_arg(c: &Corpus, id: &str) -> Result<String, String> {
    c.path(id).map(|p| p.display().to_string()).map_err(|e| e.to_string())
}

/// Worlds of `id` at which `formula` fails, by name.
fn falsified(c: &Corpus, id: &str, formula: &Formula) -> Result<Vec<String>, String> {
    let m = c.poset_model(id).map_err(|e| e.to_string())?;
    let ext = eval(&m, formula).map_err(|e| e.to_string())?;
    Ok(m.frame.names_of(m.frame.all().difference(ext.set())).into_iter().map(String::from).collect())
}

fn real_value(sys: &RealSystem, formula: &Formula) -> Result<IntervalSet, String> {
    let out = eval_real(sys, formula);
    ensure(out.status.is_determined(), || format!("{formula}: {}", out.status))?;
    Ok(out.value)
}

fn expect_value(sys: &RealSystem, formula: &str, want: &str) -> Result<(), String> {
    let got = real_value(sys, &f(formula))?;
    let want = parse_interval_set(want).map_err(|e| e.message)?;
    ensure(got == want, || format!("{formula} = {got}, expected {want}"))
}

fn excludes(sys: &RealSystem, formula: &Formula, point: &str) -> Result<(), String> {
    let x = parse_rational(point).unwrap();
    let v = real_value(sys, formula)?;
    ensure(!v.contains(&x), || format!("{point} lies in {formula} = {v}"))
}

fn fig4() -> Outcome {
    let c = corpus()?;
    let (p, q) = atoms();
    let m = c.poset_model("fig4-fs").map_err(|e| e.to_string())?;
    ensure(m.frame.is_continuous() && !m.frame.is_open(), || "fig4-fs must be continuous and not open".into())?;
    let dia = falsified(&c, "fig4-fs", &named::fs_dia(&p, &q))?;
    ensure(dia == ["w"], || format!("FS<> falsified at {dia:?}"))?;
    let boxed = f("(O<>p -> O[]q) -> O(<>p -> []q)");
    let nex = falsified(&c, "fig4-fs", &boxed)?;
    ensure(nex == ["w"], || format!("FS-next instance falsified at {nex:?}"))?;
    let (code, out) = itl(&["check", "--model", &path_arg(&c, "fig4-fs")?, "(<>p -> []q) -> [](p -> q)"])?;
    ensure(code == 1 && out.contains("falsified at: w\n"), || format!("itl check exited {code}:\n{out}"))?;
    Ok("FS<>(p,q) and FS-next(<>p,[]q) fail exactly at w; continuous, not open".into())
}

fn fig5() -> Outcome {
    let c = corpus()?;
    let (p, q) = atoms();
    let at = falsified(&c, "fig5-cem", &named::cem(&p, &q))?;
    ensure(at == ["w0"], || format!("CEM falsified at {at:?}"))?;
    Ok("CEM(p,q) fails exactly at w0".into())
}

fn kinked() -> Outcome {
    let c = corpus()?;
    let sys = c.real_system("r-kinked").map_err(|e| e.to_string())?;
    expect_value(&sys, "[*]p", "(-inf, 0)")?;
    expect_value(&sys, "O[*]p", "empty")?;
    expect_value(&sys, "[*][*]p", "empty")?;
    for g in ["[*]p -> O[*]p", "[*]O p -> O[*]p", "[*]p -> [*][*]p"] {
        expect_value(&sys, g, "(0, inf)")?;
    }
    let (code, out) = itl(&["real-check", "--system", &path_arg(&c, "r-kinked")?, "[*]p -> O[*]p"])?;
    ensure(code == 1 && out.contains("extension: (0, inf)\n") && out.contains("verdict: not valid\n"), || {
        format!("itl real-check exited {code}:\n{out}")
    })?;
    Ok("[*]p = (-inf, 0); O[*]p = [*][*]p = empty; the three implications = (0, inf)".into())
}

fn double() -> Outcome {
    let c = corpus()?;
    let (p, q) = atoms();
    let sys = c.real_system("r-double").map_err(|e| e.to_string())?;
    excludes(&sys, &named::cd(&p, &q), "0")?;
    excludes(&sys, &named::bi(&p, &q), "0")?;
    expect_value(&sys, "[]p", "(-inf, 0)")?;
    expect_value(&sys, "<>q", "(0, inf)")?;
    Ok("0 outside CD(p,q) and BI(p,q); []p = (-inf, 0); <>q = (0, inf)".into())
}

fn constant() -> Outcome {
    let c = corpus()?;
    let (p, q) = atoms();
    let sys = c.real_system("r-const").map_err(|e| e.to_string())?;
    let fs = named::fs_dia(&p, &q);
    excludes(&sys, &fs, "-1")?;
    excludes(&sys, &translate_weak(&fs), "-1")?;
    Ok("-1 outside FS<>(p,q) and its [*] form".into())
}

fn sweeps() -> Outcome {
    let runs = [
        ("ITL.db", ClassKind::Expanding),
        ("ITL.dw", ClassKind::Expanding),
        ("CDTL.db", ClassKind::Expanding),
        ("CDTL.b", ClassKind::Expanding),
        ("CDTL+.db", ClassKind::Persistent),
    ];
    let mut schemas = 0;
    for (name, kind) in runs {
        let logic = LogicSpec::parse(name).map_err(|e| e.to_string())?;
        let report = soundness_sweep(&logic, SemanticClass { kind, bound: 3 }).map_err(|e| e.to_string())?;
        if let Some(bad) = report.failures().first() {
            return Err(format!("{name}: {} {} : {}", bad.schema, bad.instance, bad.verdict));
        }
        schemas += report.entries.len();
    }
    Ok(format!("{schemas} schema instances over 5 logics, no countermodel with at most 3 worlds"))
}

fn orbit_battery() -> Outcome {
    let battery = corpus()?.formulas("battery").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    for i in 0..1000 {
        let kind = if i % 2 == 0 { ClassKind::Expanding } else { ClassKind::Persistent };
        let m = random_model(&mut rng, 8, kind, &["p", "q", "r"]);
        for g in &battery {
            let strong = eval(&m, &Formula::strong_box(g.clone())).map_err(|e| e.to_string())?;
            let weak = eval(&m, &Formula::weak_box(g.clone())).map_err(|e| e.to_string())?;
            let orbit = eval_box_by_orbit(&m, g).map_err(|e| e.to_string())?;
            ensure(strong == weak && weak == orbit, || format!("model {i}, argument {g}"))?;
        }
    }
    Ok(format!("1000 models x {} arguments, no discrepancy", battery.len()))
}

fn box_below_weak_box() -> Outcome {
    let c = corpus()?;
    let p = Formula::atom("p");
    let (sb, wb) = (Formula::strong_box(p.clone()), Formula::weak_box(p));
    let mut models = 0;
    for kind in [ClassKind::Expanding, ClassKind::Persistent] {
        for m in enumerate_models(SemanticClass { kind, bound: 3 }, &["p"]).map_err(|e| e.to_string())? {
            let s = eval(&m, &sb).map_err(|e| e.to_string())?.set();
            let w = eval(&m, &wb).map_err(|e| e.to_string())?.set();
            ensure(s == w, || format!("[]p != [*]p on {:?}", m.frame))?;
            models += 1;
        }
    }
    let mut notes = Vec::new();
    for id in c.ids_of(EntryKind::RealSystem) {
        let sys = c.real_system(id).map_err(|e| e.to_string())?;
        for atom in sys.valuation().keys() {
            let a = Formula::atom(atom);
            let s = real_value(&sys, &Formula::strong_box(a.clone())).map_err(|e| format!("{id}: {e}"))?;
            let w = real_value(&sys, &Formula::weak_box(a)).map_err(|e| format!("{id}: {e}"))?;
            ensure(s.is_subset(&w), || format!("{id}: []{atom} = {s} not inside [*]{atom} = {w}"))?;
            if sys.map.is_open() {
                ensure(s == w, || format!("{id} is open but []{atom} = {s}, [*]{atom} = {w}"))?;
            }
            if s != w {
                notes.push(format!("{id}:{atom}"));
            }
        }
    }
    Ok(format!("equal on {models} poset models; strict only at [{}] among real systems", notes.join(" ")))
}

fn double_negation_shift() -> Outcome {
    let shift = f("[]~~p -> ~~[]p");
    let persistent = validity(&shift, SemanticClass::persistent(4)).map_err(|e| e.to_string())?;
    ensure(persistent == Verdict::ValidUpTo(4), || format!("class p: {persistent}"))?;
    // recorded, not asserted
    let expanding = validity(&shift, SemanticClass::expanding(4)).map_err(|e| e.to_string())?;
    if let Verdict::Undetermined(why) = &expanding {
        return Err(format!("class e search undetermined: {why}"));
    }
    Ok(format!("class p: {persistent}; class e (recorded): {expanding}"))
}

/// Formulas that are theorems of no logic here when `g` is one: each is
/// refuted by a valuation making the fresh atom false.
fn non_theorems(g: &Formula) -> Vec<Formula> {
    let z = Formula::atom("zz");
    vec![
        Formula::and(g.clone(), z.clone()),
        Formula::implies(g.clone(), z.clone()),
        Formula::not(g.clone()),
        z.clone(),
        Formula::bottom(),
        Formula::next(z.clone()),
        Formula::strong_box(z),
    ]
}

/// Replaces the formula of every numbered line in turn, keeping the
/// justification, and requires rejection at exactly that line.
fn mutations(text: &str, logic: &LogicSpec) -> Result<usize, String> {
    let lines: Vec<&str> = text.lines().collect();
    let mut count = 0;
    for (i, line) in lines.iter().enumerate() {
        let Some((num, rest)) = line.split_once(". ") else { continue };
        let Ok(n) = num.trim().parse::<usize>() else { continue };
        let (formula, just) = rest.split_once(';').ok_or_else(|| format!("line {n} has no justification"))?;
        for bad in non_theorems(&f(formula)) {
            let mut copy: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
            copy[i] = format!("{n}. {} ;{just}", print_formula(&bad));
            let d = parse_derivation(&copy.join("\n")).map_err(|e| format!("line {n}: {}", e.message))?;
            let verdict = check(&d, logic);
            ensure(verdict.rejected_line() == Some(n), || format!("line {n} as {bad}: {verdict}"))?;
            count += 1;
        }
    }
    Ok(count)
}

fn derivations() -> Outcome {
    let c = corpus()?;
    let suite = c.suite().map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for id in ["d-wh", "d-fs", "d-cd-bi", "d-bi-cd", "d-yuse-1", "d-yuse-2"] {
        let target = suite
            .iter()
            .find_map(|ch| match &ch.expectation {
                Expectation::Proves(l) if ch.id == id => Some((l.clone(), ch.formula.clone())),
                _ => None,
            })
            .ok_or_else(|| format!("{id} has no 'proves' check"))?;
        let logic = LogicSpec::parse(&target.0).map_err(|e| e.to_string())?;
        let d = c.derivation(id).map_err(|e| e.to_string())?;
        let verdict = check(&d, &logic);
        ensure(verdict.is_accepted(), || format!("{id} in {}: {verdict}", target.0))?;
        let text = c.text(id).map_err(|e| e.to_string())?;
        let n = mutations(&text, &logic).map_err(|e| format!("{id}: {e}"))?;
        ensure(n >= 10, || format!("{id}: only {n} mutations"))?;
        summary.push(format!("{id} {n}"));
    }
    Ok(format!("all accepted; mutations rejected at their line: {}", summary.join(", ")))
}

fn separation() -> Outcome {
    let (code, out) = itl(&["separate"])?;
    let last = out.lines().last().unwrap_or("").to_string();
    ensure(code == 0, || {
        let open: Vec<String> = out
            .lines()
            .filter(|l| l.contains("unverified:") || l.contains("FAILED"))
            .map(|l| l.split_whitespace().take(4).collect::<Vec<_>>().join(" "))
            .collect();
        format!("itl separate exited {code}; {last}; open: {}", open.join(", "))
    })?;
    Ok(last)
}

fn cem_on_line() -> Outcome {
    let c = corpus()?;
    let (p, q) = atoms();
    let cem = named::cem(&p, &q);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for id in ["r-double", "r-kinked"] {
        let base = c.real_system(id).map_err(|e| e.to_string())?;
        let v = real_value(&base, &cem)?;
        ensure(v.is_everything(), || format!("{id}: CEM = {v}"))?;
        for _ in 0..20 {
            let val = ["p", "q"].iter().map(|a| (a.to_string(), open_set(&mut rng, 3))).collect();
            let sys = base.with_valuation(val).map_err(|e| e.to_string())?;
            let v = real_value(&sys, &cem)?;
            ensure(v.is_everything(), || format!("{id} with p = {}, q = {}: CEM = {v}", sys.atom("p"), sys.atom("q")))?;
        }
    }
    Ok("CEM(p,q) is the whole line on r-double and r-kinked for 21 valuations each".into())
}

/// Points where membership in any of `sets` may change, and one point in
/// each gap between them.
fn probes(sets: &[&IntervalSet], extra: &[Rational]) -> Vec<Rational> {
    let mut ends: Vec<Rational> = sets.iter().flat_map(|s| s.endpoints()).chain(extra.iter().cloned()).collect();
    ends.sort();
    ends.dedup();
    let mut out = ends.clone();
    for w in ends.windows(2) {
        out.push((&w[0] + &w[1]) / q(2, 1));
    }
    match (ends.first(), ends.last()) {
        (Some(a), Some(b)) => out.extend([a - q(1, 1), b + q(1, 1)]),
        _ => out.push(q(0, 1)),
    }
    out
}

fn interval_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let rounds = 10_000;
    for i in 0..rounds {
        let (a, b) = (interval_set(&mut rng, 4), interval_set(&mut rng, 4));
        let fail = |what: &str| format!("round {i}: {what} with a = {a}, b = {b}");
        let (u, n, c) = (a.union(&b), a.intersect(&b), a.complement());
        ensure([&u, &n, &c].iter().all(|s| s.is_canonical()), || fail("non-canonical result"))?;
        ensure(u.complement() == c.intersect(&b.complement()), || fail("De Morgan for union"))?;
        ensure(n.complement() == c.union(&b.complement()), || fail("De Morgan for intersection"))?;
        ensure(a.interior().complement() == c.closure(), || fail("interior/closure duality"))?;
        ensure(a.closure().complement() == c.interior(), || fail("closure/interior duality"))?;
        let map = piecewise_map(&mut rng, 3);
        let pre = map.preimage(&a);
        for x in probes(&[&pre, &a], map.breakpoints()) {
            ensure(pre.contains(&x) == a.contains(&map.apply(&x)), || fail(&format!("preimage under {map} at {x}")))?;
        }
    }
    Ok(format!("{rounds} rounds of canonical form, De Morgan, duality and preimage sampling"))
}

struct Criterion {
    number: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { number: 1, name: "Fischer Servi countermodel fig4-fs", limit: secs(1), run: fig4 },
        Criterion { number: 2, name: "CEM countermodel fig5-cem", limit: secs(1), run: fig5 },
        Criterion { number: 3, name: "weak henceforth values on r-kinked", limit: secs(1), run: kinked },
        Criterion { number: 4, name: "CD and BI fail at 0 on r-double", limit: secs(1), run: double },
        Criterion { number: 5, name: "Fischer Servi fails at -1 on r-const", limit: secs(1), run: constant },
        Criterion { number: 6, name: "soundness sweeps, bound 3", limit: None, run: sweeps },
        Criterion { number: 7, name: "[] = [*] = orbit on random posets", limit: None, run: orbit_battery },
        Criterion { number: 8, name: "[]p inside [*]p", limit: None, run: box_below_weak_box },
        Criterion { number: 9, name: "double negation shift", limit: None, run: double_negation_shift },
        Criterion { number: 10, name: "derivations and mutations", limit: secs(5), run: derivations },
        Criterion { number: 11, name: "separation edges (itl separate)", limit: secs(120), run: separation },
        Criterion { number: 12, name: "CEM valid on the line", limit: None, run: cem_on_line },
        Criterion { number: 13, name: "interval algebra, 10^4 rounds", limit: secs(30), run: interval_algebra },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!("took {took:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (mark, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!("criterion {:>2} {mark} {} ({took:.2?}): {detail}", c.number, c.name);
        if outcome.is_err() {
            failed.push(c.number);
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {failed:?}");
        ExitCode::FAILURE
    }
}
