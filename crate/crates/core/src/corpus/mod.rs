//! The bundled artifacts: models, real-line systems, derivations, formula
//! lists and the separation edges, plus the checks anchored to them.

mod suite;

pub use suite::{parse_suite, run_suite, Check, CheckResult, Expectation};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::formula::Formula;
use crate::hilbert::{schema, BaseLogic, Derivation};
use crate::parser::{content_lines, parse_derivation, parse_formula, parse_poset_model, parse_real_system, ParseError};
use crate::poset::PosetModel;
use crate::realline::RealSystem;

/// Environment variable naming an alternative corpus directory.
pub const CORPUS_ENV: &str = "ITL_CORPUS";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("corpus directory {0} not found")]
    Missing(PathBuf),
    #[error("no corpus entry named '{0}'")]
    UnknownEntry(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{file}:{line}: {message}")]
    Index { file: String, line: usize, message: String },
    #[error("entry '{id}': {message}")]
    Parse { id: String, message: String },
    #[error("entry '{id}' is a {actual}, not a {expected}")]
    WrongKind { id: String, expected: EntryKind, actual: EntryKind },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntryKind {
    PosetModel,
    RealSystem,
    Derivation,
    Formulas,
    Edges,
}

impl EntryKind {
    pub const ALL: [EntryKind; 5] =
        [EntryKind::PosetModel, EntryKind::RealSystem, EntryKind::Derivation, EntryKind::Formulas, EntryKind::Edges];

    /// Directory name under the corpus root.
    pub fn dir(self) -> &'static str {
        match self {
            EntryKind::PosetModel => "poset",
            EntryKind::RealSystem => "real",
            EntryKind::Derivation => "deriv",
            EntryKind::Formulas => "formula",
            EntryKind::Edges => "edges",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            EntryKind::PosetModel => "dpm",
            EntryKind::RealSystem => "rds",
            EntryKind::Derivation => "drv",
            EntryKind::Formulas => "fml",
            EntryKind::Edges => "edg",
        }
    }

    fn from_dir(s: &str) -> Option<Self> {
        EntryKind::ALL.into_iter().find(|k| k.dir() == s)
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::PosetModel => "poset model",
            EntryKind::RealSystem => "real system",
            EntryKind::Derivation => "derivation",
            EntryKind::Formulas => "formula list",
            EntryKind::Edges => "edge list",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: EntryKind,
    /// Relative to the corpus root.
    pub path: PathBuf,
    pub anchor: String,
}

/// One edge of the separation graph: `label` is a theorem of `to` that is
/// not a theorem of `from`. Solid edges also assert that `from` is
/// contained in `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: BaseLogic,
    pub to: BaseLogic,
    pub dashed: bool,
    /// Schema name of the separating formula.
    pub label: &'static str,
    /// Corpus id and point (world name or rational) of a falsifying
    /// structure, when one is bundled.
    pub witness: Option<(String, String)>,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.dashed { "-->" } else { "->" };
        write!(f, "{} {arrow} {} [{}]", self.from.name(), self.to.name(), self.label)
    }
}

/// A parsed and validated artifact.
#[derive(Clone, Debug)]
pub enum Artifact {
    PosetModel(PosetModel),
    RealSystem(RealSystem),
    Derivation(Derivation),
    Formulas(Vec<Formula>),
    Edges(Vec<Edge>),
}

impl Artifact {
    pub fn kind(&self) -> EntryKind {
        match self {
            Artifact::PosetModel(_) => EntryKind::PosetModel,
            Artifact::RealSystem(_) => EntryKind::RealSystem,
            Artifact::Derivation(_) => EntryKind::Derivation,
            Artifact::Formulas(_) => EntryKind::Formulas,
            Artifact::Edges(_) => EntryKind::Edges,
        }
    }
}

/// An opened corpus directory.
#[derive(Clone, Debug)]
pub struct Corpus {
    root: PathBuf,
    entries: Vec<CorpusEntry>,
}

impl Corpus {
    /// `$ITL_CORPUS` if set, otherwise the `corpus` directory of this
    /// source tree.
    pub fn default_root() -> PathBuf {
        match std::env::var_os(CORPUS_ENV) {
            Some(dir) => PathBuf::from(dir),
            None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"),
        }
    }

    pub fn open_default() -> Result<Self, CorpusError> {
        Self::open(Self::default_root())
    }

    /// Reads `index.txt` under `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, CorpusError> {
        let root = root.into();
        if !root.is_dir() {
            return Err(CorpusError::Missing(root));
        }
        let text = read(&root.join("index.txt"))?;
        let mut entries: Vec<CorpusEntry> = Vec::new();
        for (i, (_, line)) in content_lines(&text).into_iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| CorpusError::Index { file: "index.txt".into(), line: i + 1, message };
            let cols: Vec<&str> = line.split('|').map(str::trim).collect();
            let [id, kind, path, anchor] = cols[..] else {
                return Err(bad("expected 'id | kind | path | anchor'".into()));
            };
            let kind = EntryKind::from_dir(kind).ok_or_else(|| bad(format!("unknown kind '{kind}'")))?;
            let expected = format!("{}/{id}.{}", kind.dir(), kind.extension());
            if path != expected {
                return Err(bad(format!("path of '{id}' must be {expected}")));
            }
            if entries.iter().any(|e| e.id == id) {
                return Err(bad(format!("duplicate id '{id}'")));
            }
            entries.push(CorpusEntry { id: id.into(), kind, path: path.into(), anchor: anchor.into() });
        }
        Ok(Corpus { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn entry(&self, id: &str) -> Result<&CorpusEntry, CorpusError> {
        self.entries.iter().find(|e| e.id == id).ok_or_else(|| CorpusError::UnknownEntry(id.into()))
    }

    pub fn path(&self, id: &str) -> Result<PathBuf, CorpusError> {
        Ok(self.root.join(&self.entry(id)?.path))
    }

    pub fn text(&self, id: &str) -> Result<String, CorpusError> {
        read(&self.path(id)?)
    }

    /// Loads and validates an entry.
    pub fn load(&self, id: &str) -> Result<Artifact, CorpusError> {
        let entry = self.entry(id)?;
        let text = read(&self.root.join(&entry.path))?;
        let wrap = |e: ParseError| {
            let (line, col) = e.span.line_col(&text);
            CorpusError::Parse { id: id.into(), message: format!("{line}:{col}: {}", e.message) }
        };
        Ok(match entry.kind {
            EntryKind::PosetModel => Artifact::PosetModel(parse_poset_model(&text).map_err(wrap)?),
            EntryKind::RealSystem => Artifact::RealSystem(parse_real_system(&text).map_err(wrap)?),
            EntryKind::Derivation => Artifact::Derivation(parse_derivation(&text).map_err(wrap)?),
            EntryKind::Formulas => Artifact::Formulas(parse_formula_list(&text).map_err(wrap)?),
            EntryKind::Edges => Artifact::Edges(parse_edges(&text).map_err(wrap)?),
        })
    }

    fn wrong(&self, id: &str, expected: EntryKind, got: &Artifact) -> CorpusError {
        CorpusError::WrongKind { id: id.into(), expected, actual: got.kind() }
    }

    pub fn poset_model(&self, id: &str) -> Result<PosetModel, CorpusError> {
        match self.load(id)? {
            Artifact::PosetModel(m) => Ok(m),
            a => Err(self.wrong(id, EntryKind::PosetModel, &a)),
        }
    }

    pub fn real_system(&self, id: &str) -> Result<RealSystem, CorpusError> {
        match self.load(id)? {
            Artifact::RealSystem(s) => Ok(s),
            a => Err(self.wrong(id, EntryKind::RealSystem, &a)),
        }
    }

    pub fn derivation(&self, id: &str) -> Result<Derivation, CorpusError> {
        match self.load(id)? {
            Artifact::Derivation(d) => Ok(d),
            a => Err(self.wrong(id, EntryKind::Derivation, &a)),
        }
    }

    pub fn formulas(&self, id: &str) -> Result<Vec<Formula>, CorpusError> {
        match self.load(id)? {
            Artifact::Formulas(f) => Ok(f),
            a => Err(self.wrong(id, EntryKind::Formulas, &a)),
        }
    }

    pub fn edges(&self, id: &str) -> Result<Vec<Edge>, CorpusError> {
        match self.load(id)? {
            Artifact::Edges(e) => Ok(e),
            a => Err(self.wrong(id, EntryKind::Edges, &a)),
        }
    }

    /// Ids of every entry of `kind`, in index order.
    pub fn ids_of(&self, kind: EntryKind) -> Vec<&str> {
        self.entries.iter().filter(|e| e.kind == kind).map(|e| e.id.as_str()).collect()
    }

    /// The checks listed in `suite.txt`.
    pub fn suite(&self) -> Result<Vec<Check>, CorpusError> {
        let text = read(&self.root.join("suite.txt"))?;
        parse_suite(&text).map_err(|e| {
            let (line, _) = e.span.line_col(&text);
            CorpusError::Index { file: "suite.txt".into(), line, message: e.message }
        })
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// One formula per non-empty line.
pub fn parse_formula_list(text: &str) -> Result<Vec<Formula>, ParseError> {
    content_lines(text)
        .into_iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(offset, l)| parse_formula(l).map_err(|e| e.shifted(offset)))
        .collect()
}

/// Edge lines: `from to solid|dashed label witness point`, with `-` for a
/// missing witness and point.
pub fn parse_edges(text: &str) -> Result<Vec<Edge>, ParseError> {
    let mut out = Vec::new();
    for (offset, line) in content_lines(text) {
        let ws = crate::parser::words(line, offset);
        if ws.is_empty() {
            continue;
        }
        let span = crate::parser::SourceSpan::new(offset, offset + line.len());
        if ws.len() != 6 {
            return Err(ParseError::new(span, "expected 'from to solid|dashed label witness point'"));
        }
        let logic = |i: usize| {
            BaseLogic::from_name(ws[i].0)
                .ok_or_else(|| ParseError::new(ws[i].1, format!("unknown logic '{}'", ws[i].0)))
        };
        let dashed = match ws[2].0 {
            "solid" => false,
            "dashed" => true,
            other => return Err(ParseError::new(ws[2].1, format!("expected solid or dashed, found '{other}'"))),
        };
        let label =
            schema(ws[3].0).ok_or_else(|| ParseError::new(ws[3].1, format!("unknown axiom '{}'", ws[3].0)))?.name;
        let witness = match (ws[4].0, ws[5].0) {
            ("-", "-") => None,
            ("-", _) | (_, "-") => {
                return Err(ParseError::new(span, "witness and point must both be given or both be '-'"))
            }
            (id, point) => Some((id.to_string(), point.to_string())),
        };
        out.push(Edge { from: logic(0)?, to: logic(1)?, dashed, label, witness });
    }
    Ok(out)
}
