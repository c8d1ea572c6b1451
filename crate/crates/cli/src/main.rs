//! `itl`: batch front end for model checking, proof checking and
//! countermodel search.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use itl_core::corpus::{run_suite, Corpus, CorpusError};
use itl_core::formula::{in_fragment, Formula, LanguageFragment};
use itl_core::hilbert::{check, HilbertError, LogicSpec};
use itl_core::parser::{
    parse_caps_text, parse_derivation, parse_formula, parse_poset_model, parse_real_system, print_formula, ParseError,
};
use itl_core::poset::{eval_all, ModelError};
use itl_core::realline::{eval_real, Caps, RealError};
use itl_core::search::{
    build_separation_matrix, sampled_validity, soundness_sweep, validity, verdict_record, ClassKind, SearchError,
    SemanticClass, Verdict, DEFAULT_BOUND,
};

/// Exit statuses. Each error family has its own code.
mod exit {
    pub const OK: u8 = 0;
    pub const FALSIFIED: u8 = 1;
    pub const UNDETERMINED: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const MODEL: u8 = 4;
    pub const CORPUS: u8 = 5;
    pub const SEARCH: u8 = 6;
    pub const LOGIC: u8 = 7;
}

#[derive(Parser)]
#[command(
    name = "itl",
    version,
    about = "Model checking, proof checking and countermodel search for intuitionistic temporal logics"
)]
struct Cli {
    /// Output form.
    #[arg(long, value_enum, global = true, default_value_t = Format::Plain)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expect {
    Valid,
    Falsified,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    E,
    P,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normalized formula and the languages containing it.
    Parse { formula: String },
    /// Evaluate a formula on a finite dynamic poset.
    Check {
        #[arg(long)]
        model: PathBuf,
        formula: String,
        /// Exit 0 when the outcome matches, 1 otherwise.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Evaluate a formula on a piecewise-affine system on the real line.
    RealCheck {
        #[arg(long)]
        system: PathBuf,
        formula: String,
        /// Iteration caps, e.g. "iter=64,restart=8,parts=256".
        #[arg(long)]
        caps: Option<String>,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Search a class of finite dynamic posets for a countermodel.
    Validate {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        formula: String,
        /// Also draw this many random models with up to --worlds worlds.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        worlds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write a countermodel here in the model file format.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Check a derivation file in a logic.
    Prove {
        #[arg(long)]
        logic: String,
        file: PathBuf,
    },
    /// Search for countermodels to every axiom of a logic.
    Sweep {
        #[arg(long)]
        logic: String,
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Run the checks anchored to the bundled corpus.
    PaperSuite {
        /// Only entries whose id contains this text.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Verify every edge of the separation graph.
    Separate,
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::new(exit::CORPUS, e.to_string())
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        Failure::new(exit::SEARCH, e.to_string())
    }
}

impl From<HilbertError> for Failure {
    fn from(e: HilbertError) -> Self {
        Failure::new(exit::LOGIC, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::new(exit::MODEL, e.to_string())
    }
}

impl From<RealError> for Failure {
    fn from(e: RealError) -> Self {
        Failure::new(exit::MODEL, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", path.display())))
}

fn parse_error(what: &str, text: &str, e: ParseError) -> Failure {
    Failure::new(exit::INPUT, format!("{what}: {}", e.render(text)))
}

fn formula_arg(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| parse_error("formula", text, e))
}

/// Exit code of a determined outcome, honoring `--expect`.
fn verdict_code(valid: bool, expect: Option<Expect>) -> u8 {
    match expect {
        None if valid => exit::OK,
        None => exit::FALSIFIED,
        Some(Expect::Valid) if valid => exit::OK,
        Some(Expect::Falsified) if !valid => exit::OK,
        Some(_) => exit::FALSIFIED,
    }
}

fn class_kind(c: Class) -> ClassKind {
    match c {
        Class::E => ClassKind::Expanding,
        Class::P => ClassKind::Persistent,
    }
}

fn cmd_parse(format: Format, text: &str) -> Result<u8, Failure> {
    let f = formula_arg(text)?;
    let fragments = [
        LanguageFragment::NEXT_ONLY,
        LanguageFragment::DIAMOND_BOX,
        LanguageFragment::DIAMOND_WEAK,
        LanguageFragment::BOX,
        LanguageFragment::WEAK,
        LanguageFragment::DIAMOND,
        LanguageFragment::FULL,
    ];
    let members: Vec<String> = fragments.iter().filter(|fr| in_fragment(&f, **fr)).map(|fr| fr.name()).collect();
    let atoms: Vec<String> = f.atoms().iter().map(|a| a.to_string()).collect();
    match format {
        Format::Plain => {
            println!("formula: {}", print_formula(&f));
            println!("size: {}  depth: {}", f.size(), f.depth());
            println!("atoms: {}", atoms.join(" "));
            println!("languages: {}", members.join(" "));
        }
        Format::Records => println!(
            "parse\tformula={}\tsize={}\tdepth={}\tatoms={}\tlanguages={}",
            f,
            f.size(),
            f.depth(),
            atoms.join(","),
            members.join(",")
        ),
    }
    Ok(exit::OK)
}

fn cmd_check(format: Format, model: &Path, text: &str, expect: Option<Expect>) -> Result<u8, Failure> {
    let src = read(model)?;
    let m = parse_poset_model(&src).map_err(|e| parse_error(&model.display().to_string(), &src, e))?;
    let f = formula_arg(text)?;
    let all = eval_all(&m, &f)?;
    let ext = all.last().unwrap().1.set();
    let frame = &m.frame;
    let fails = frame.all().difference(ext);
    match format {
        Format::Plain => {
            println!("formula: {f}");
            println!("extension: {}", frame.format_set(ext));
            for w in 0..frame.len() {
                println!("  {}: {}", frame.name(w), if ext.contains(w) { "true" } else { "false" });
            }
            if fails.is_empty() {
                println!("valid");
            } else {
                println!("falsified at: {}", frame.names_of(fails).join(" "));
            }
        }
        Format::Records => {
            for (g, set) in &all {
                println!("subformula\tformula={g}\textension={}", frame.names_of(set.set()).join(","));
            }
            println!(
                "check\tformula={f}\textension={}\tfalsified={}\tverdict={}",
                frame.names_of(ext).join(","),
                frame.names_of(fails).join(","),
                if fails.is_empty() { "valid" } else { "falsified" }
            );
        }
    }
    Ok(verdict_code(fails.is_empty(), expect))
}

fn cmd_real_check(
    format: Format,
    system: &Path,
    text: &str,
    caps: Option<&str>,
    expect: Option<Expect>,
) -> Result<u8, Failure> {
    let src = read(system)?;
    let mut sys = parse_real_system(&src).map_err(|e| parse_error(&system.display().to_string(), &src, e))?;
    if let Some(c) = caps {
        let overrides = parse_caps_text(c).map_err(|e| parse_error("caps", c, e))?;
        sys.caps = merge_caps(sys.caps, c, overrides);
    }
    let f = formula_arg(text)?;
    let out = eval_real(&sys, &f);
    let verdict = match out.is_valid() {
        Some(true) => "valid",
        Some(false) => "not valid",
        None => "undetermined",
    };
    // values of undetermined entries carry no information
    let shown = |s: &itl_core::realline::SubformulaOutcome| {
        if s.status.is_determined() {
            s.value.to_string()
        } else {
            "?".to_string()
        }
    };
    match format {
        Format::Plain => {
            println!("formula: {f}");
            for s in &out.subformulas {
                println!("  [{}] {} = {}", s.status, s.formula, shown(s));
            }
            if out.status.is_determined() {
                println!("extension: {}", out.value);
            } else {
                println!("extension: undetermined");
            }
            println!("status: {}", out.status);
            println!("verdict: {verdict}");
        }
        Format::Records => {
            for s in &out.subformulas {
                println!("subformula\tformula={}\tvalue={}\tstatus={}", s.formula, shown(s), s.status);
            }
            println!(
                "real-check\tformula={f}\textension={}\tstatus={}\tverdict={verdict}",
                shown(out.subformulas.last().unwrap()),
                out.status
            );
        }
    }
    Ok(match out.is_valid() {
        None => exit::UNDETERMINED,
        Some(valid) => verdict_code(valid, expect),
    })
}

/// Applies only the caps named in `text`.
fn merge_caps(base: Caps, text: &str, parsed: Caps) -> Caps {
    let mut caps = base;
    for key in text.split([',', ' ']).filter_map(|kv| kv.split_once('=')).map(|(k, _)| k.trim()) {
        match key {
            "iter" => caps.iter = parsed.iter,
            "restart" => caps.restart = parsed.restart,
            "orbit" => caps.orbit = parsed.orbit,
            "window" => caps.window = parsed.window,
            "parts" => caps.parts = parsed.parts,
            _ => {}
        }
    }
    caps
}

#[allow(clippy::too_many_arguments)]
fn cmd_validate(
    format: Format,
    class: Class,
    bound: usize,
    text: &str,
    samples: usize,
    worlds: usize,
    seed: u64,
    save: Option<&Path>,
) -> Result<u8, Failure> {
    let f = formula_arg(text)?;
    let class = SemanticClass { kind: class_kind(class), bound };
    let mut verdict = validity(&f, class)?;
    if verdict.is_valid_up_to() && samples > 0 {
        if let Verdict::Countermodel(c) = sampled_validity(&f, class.kind, worlds, samples, seed) {
            verdict = Verdict::Countermodel(c);
        }
    }
    match format {
        Format::Plain => {
            println!("formula: {f}");
            println!("class: {class}");
            println!("verdict: {verdict}");
            if let Verdict::Countermodel(c) = &verdict {
                println!("countermodel:");
                print!("{}", itl_core::parser::print_poset_model(&c.model));
            }
        }
        Format::Records => print!("{}", verdict_record(&f, class, &verdict)),
    }
    if let (Some(path), Verdict::Countermodel(c)) = (save, &verdict) {
        let body = format!("# falsifies {f} at {}\n{}", c.world_name(), itl_core::parser::print_poset_model(&c.model));
        fs::write(path, body).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", path.display())))?;
    }
    Ok(match verdict {
        Verdict::ValidUpTo(_) => exit::OK,
        Verdict::Countermodel(_) => exit::FALSIFIED,
        Verdict::Undetermined(_) => exit::UNDETERMINED,
    })
}

fn cmd_prove(format: Format, logic: &str, file: &Path) -> Result<u8, Failure> {
    let logic = LogicSpec::parse(logic)?;
    let src = read(file)?;
    let d = parse_derivation(&src).map_err(|e| parse_error(&file.display().to_string(), &src, e))?;
    let verdict = check(&d, &logic);
    match format {
        Format::Plain => {
            println!("logic: {}", logic.name);
            if let Some(t) = d.theorem() {
                println!("theorem: {t}");
            }
            println!("{verdict}");
        }
        Format::Records => println!(
            "prove\tlogic={}\tfile={}\tverdict={}\tdetail={verdict}",
            logic.name,
            file.display(),
            if verdict.is_accepted() { "accepted" } else { "rejected" }
        ),
    }
    Ok(if verdict.is_accepted() { exit::OK } else { exit::FALSIFIED })
}

fn cmd_sweep(format: Format, logic: &str, class: Class, bound: usize) -> Result<u8, Failure> {
    let logic = LogicSpec::parse(logic)?;
    let class = SemanticClass { kind: class_kind(class), bound };
    let report = soundness_sweep(&logic, class)?;
    for e in &report.entries {
        match format {
            Format::Plain => println!("{:<12} {:<50} {}", e.schema, e.instance.to_string(), e.verdict),
            Format::Records => print!("{}", verdict_record(&e.instance, class, &e.verdict)),
        }
    }
    let failures = report.failures().len();
    if format == Format::Plain {
        println!("{}: {} schemas, {failures} with a countermodel in {class}", logic.name, report.entries.len());
    }
    Ok(if failures == 0 { exit::OK } else { exit::FALSIFIED })
}

fn cmd_paper_suite(format: Format, filter: Option<&str>) -> Result<u8, Failure> {
    let corpus = Corpus::open_default()?;
    let results = run_suite(&corpus, filter)?;
    if results.is_empty() {
        return Err(Failure::new(exit::CORPUS, format!("no corpus entry matches '{}'", filter.unwrap_or(""))));
    }
    for r in &results {
        match format {
            Format::Plain => {
                println!("{} {} ({})", if r.passed { "PASS" } else { "FAIL" }, r.check.describe(), r.detail)
            }
            Format::Records => println!(
                "check\tid={}\tline={}\tresult={}\tdetail={}",
                r.check.id,
                r.check.line,
                if r.passed { "pass" } else { "fail" },
                r.detail
            ),
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if format == Format::Plain {
        println!("{} checks, {failed} failed", results.len());
    }
    Ok(if failed == 0 { exit::OK } else { exit::FALSIFIED })
}

fn cmd_separate(format: Format) -> Result<u8, Failure> {
    let corpus = Corpus::open_default()?;
    let matrix = build_separation_matrix(&corpus)?;
    match format {
        Format::Plain => print!("{}", matrix.render_plain()),
        Format::Records => print!("{}", matrix.render_records()),
    }
    Ok(if !matrix.failed().is_empty() {
        exit::FALSIFIED
    } else if !matrix.unverified().is_empty() {
        exit::UNDETERMINED
    } else {
        exit::OK
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Parse { formula } => cmd_parse(format, &formula),
        Command::Check { model, formula, expect } => cmd_check(format, &model, &formula, expect),
        Command::RealCheck { system, formula, caps, expect } => {
            cmd_real_check(format, &system, &formula, caps.as_deref(), expect)
        }
        Command::Validate { class, bound, formula, samples, worlds, seed, save } => {
            cmd_validate(format, class, bound, &formula, samples, worlds, seed, save.as_deref())
        }
        Command::Prove { logic, file } => cmd_prove(format, &logic, &file),
        Command::Sweep { logic, class, bound } => cmd_sweep(format, &logic, class, bound),
        Command::PaperSuite { filter } => cmd_paper_suite(format, filter.as_deref()),
        Command::Separate => cmd_separate(format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT } else { exit::OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> u8 {
        let cli = Cli::try_parse_from(std::iter::once("itl").chain(args.iter().copied())).unwrap();
        match run(cli) {
            Ok(c) => c,
            Err(f) => f.code,
        }
    }

    fn entry(id: &str) -> String {
        Corpus::open_default().unwrap().path(id).unwrap().display().to_string()
    }

    fn scratch(name: &str, body: &str) -> String {
        let path = std::env::temp_dir().join(format!("itl-{}-{name}", std::process::id()));
        fs::write(&path, body).unwrap();
        path.display().to_string()
    }

    #[test]
    fn check_exit_codes() {
        let fig4 = entry("fig4-fs");
        let fs = "(<>p -> []q) -> [](p -> q)";
        assert_eq!(code(&["check", "--model", &fig4, fs]), exit::FALSIFIED);
        assert_eq!(code(&["check", "--model", &fig4, fs, "--expect", "falsified"]), exit::OK);
        assert_eq!(code(&["check", "--model", &fig4, fs, "--expect", "valid"]), exit::FALSIFIED);
        assert_eq!(code(&["check", "--model", &fig4, "p -> p"]), exit::OK);
        assert_eq!(code(&["--format", "records", "check", "--model", &fig4, "q"]), exit::FALSIFIED);
    }

    #[test]
    fn real_check_exit_codes() {
        let kinked = entry("r-kinked");
        assert_eq!(code(&["real-check", "--system", &kinked, "[*]p -> O[*]p"]), exit::FALSIFIED);
        assert_eq!(code(&["real-check", "--system", &kinked, "[*]p -> p"]), exit::OK);
        let shift = entry("r-shift");
        assert_eq!(code(&["real-check", "--system", &shift, "<>p"]), exit::UNDETERMINED);
        assert_eq!(code(&["real-check", "--system", &shift, "<>p", "--caps", "iter=2,bogus=1"]), exit::INPUT);
        assert_eq!(code(&["real-check", "--system", &shift, "[]p -> p", "--caps", "iter=4"]), exit::OK);
    }

    #[test]
    fn validate_and_sweep() {
        assert_eq!(code(&["validate", "--class", "e", "--bound", "2", "<>p -> p"]), exit::FALSIFIED);
        assert_eq!(code(&["validate", "--class", "p", "--bound", "3", "(<>p -> []q) -> [](p -> q)"]), exit::OK);
        assert_eq!(code(&["validate", "--class", "e", "--bound", "9", "p"]), exit::SEARCH);
        assert_eq!(code(&["validate", "--class", "e", "--bound", "0", "p"]), exit::SEARCH);
        assert_eq!(code(&["sweep", "--logic", "ITL", "--class", "e", "--bound", "2"]), exit::OK);
        assert_eq!(code(&["sweep", "--logic", "ITL+", "--class", "e", "--bound", "3"]), exit::FALSIFIED);
    }

    #[test]
    fn saved_countermodel_reloads() {
        let out = std::env::temp_dir().join(format!("itl-{}-cm.dpm", std::process::id()));
        let out = out.display().to_string();
        assert_eq!(code(&["validate", "--class", "e", "--bound", "3", "<>p -> p", "--save", &out]), exit::FALSIFIED);
        assert_eq!(code(&["check", "--model", &out, "<>p -> p", "--expect", "falsified"]), exit::OK);
    }

    #[test]
    fn prove_exit_codes() {
        let fs = entry("d-fs");
        assert_eq!(code(&["prove", "--logic", "ITL+.db", &fs]), exit::OK);
        assert_eq!(code(&["prove", "--logic", "ITL.db", &fs]), exit::FALSIFIED);
        assert_eq!(code(&["prove", "--logic", "NOPE", &fs]), exit::LOGIC);
        assert_eq!(code(&["prove", "--logic", "ITL", "/nonexistent/x.drv"]), exit::INPUT);
    }

    #[test]
    fn input_and_model_errors() {
        assert_eq!(code(&["parse", "p ->"]), exit::INPUT);
        assert_eq!(code(&["parse", "[](p -> O p) -> p -> []p"]), exit::OK);
        let swapped = scratch("swap.dpm", "worlds: a b\norder: a<=b\nstep: a->b b->a\n");
        assert_eq!(code(&["check", "--model", &swapped, "p"]), exit::MODEL);
        let closed = scratch("closed.rds", "map: 2*x\nval p: [0, 1]\n");
        assert_eq!(code(&["real-check", "--system", &closed, "p"]), exit::INPUT);
    }

    #[test]
    fn corpus_commands() {
        assert_eq!(code(&["paper-suite", "--filter", "r-double"]), exit::OK);
        assert_eq!(code(&["paper-suite", "--filter", "no-such-entry"]), exit::CORPUS);
    }
}
