//! Text formats: the formula grammar and the line-based model, system and
//! derivation files.
//!
//! ```text
//! impl  := disj ('->' impl)? | disj ('<->' disj)
//! disj  := conj ('|' conj)*
//! conj  := unary ('&' unary)*
//! unary := ('~' | 'O' | '<>' | '[]' | '[*]') unary | atom
//! atom  := 'false' | identifier | '(' impl ')'
//! ```
//!
//! Unicode spellings of the connectives are accepted on input and never
//! printed.

mod derivation;
mod model;
mod system;

pub use derivation::{parse_derivation, print_derivation};
pub use model::{parse_poset_model, print_poset_model};
pub use system::{
    parse_affine, parse_caps_text, parse_interval_set, parse_rational, parse_real_system, print_real_system,
};

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

/// Byte offsets `begin..end` into the parsed text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(begin: usize, end: usize) -> Self {
        debug_assert!(begin <= end);
        Self { begin, end }
    }

    pub fn shifted(self, by: usize) -> Self {
        Self::new(self.begin + by, self.end + by)
    }

    /// 1-based line and column of `begin` within `text`.
    pub fn line_col(&self, text: &str) -> (usize, usize) {
        let upto = &text[..self.begin.min(text.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rfind('\n').map_or(upto.chars().count(), |i| upto[i + 1..].chars().count()) + 1;
        (line, col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.begin, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} (at bytes {span})")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        Self { span, message: message.into() }
    }

    pub fn shifted(mut self, by: usize) -> Self {
        self.span = self.span.shifted(by);
        self
    }

    /// Message prefixed with the line and column in `text`.
    pub fn render(&self, text: &str) -> String {
        let (line, col) = self.span.line_col(text);
        format!("line {line}, column {col}: {}", self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Imp,
    Iff,
    Or,
    And,
    Not,
    Next,
    Dia,
    Box,
    Weak,
    LParen,
    RParen,
    False,
    Ident(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Imp => "'->'".into(),
            Tok::Iff => "'<->'".into(),
            Tok::Or => "'|'".into(),
            Tok::And => "'&'".into(),
            Tok::Not => "'~'".into(),
            Tok::Next => "'O'".into(),
            Tok::Dia => "'<>'".into(),
            Tok::Box => "'[]'".into(),
            Tok::Weak => "'[*]'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::False => "'false'".into(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::End => "end of input".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut toks = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let rest = &text[i..];
        let fixed: &[(&str, Tok)] = &[
            ("<->", Tok::Iff),
            ("->", Tok::Imp),
            ("<>", Tok::Dia),
            ("[*]", Tok::Weak),
            ("[]", Tok::Box),
            ("|", Tok::Or),
            ("&", Tok::And),
            ("~", Tok::Not),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("↔", Tok::Iff),
            ("→", Tok::Imp),
            ("∨", Tok::Or),
            ("∧", Tok::And),
            ("¬", Tok::Not),
            ("○", Tok::Next),
            ("◇", Tok::Dia),
            ("□", Tok::Box),
            ("⊡", Tok::Weak),
            ("⊥", Tok::False),
        ];
        if let Some((s, t)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            toks.push((t.clone(), SourceSpan::new(i, i + s.len())));
            for _ in 0..s.chars().count() {
                it.next();
            }
            continue;
        }
        if is_ident_start(c) {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if is_ident_char(d) {
                    end = j + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let word = &text[i..end];
            let tok = match word {
                "O" => Tok::Next,
                "false" => Tok::False,
                _ => Tok::Ident(word.to_string()),
            };
            toks.push((tok, SourceSpan::new(i, end)));
            continue;
        }
        return Err(ParseError::new(SourceSpan::new(i, i + c.len_utf8()), format!("unexpected character '{c}'")));
    }
    toks.push((Tok::End, SourceSpan::new(text.len(), text.len())));
    Ok(toks)
}

struct FormulaParser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl FormulaParser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(self.span(), format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Imp => {
                self.bump();
                let rhs = self.implication()?;
                Ok(Formula::implies(lhs, rhs))
            }
            Tok::Iff => {
                self.bump();
                let rhs = self.disjunction()?;
                if matches!(self.peek(), Tok::Iff | Tok::Imp) {
                    return Err(ParseError::new(self.span(), "'<->' is non-associative; add parentheses"));
                }
                Ok(Formula::iff(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let build: fn(Formula) -> Formula = match self.peek() {
            Tok::Not => Formula::not,
            Tok::Next => Formula::next,
            Tok::Dia => Formula::eventually,
            Tok::Box => Formula::strong_box,
            Tok::Weak => Formula::weak_box,
            _ => return self.atom(),
        };
        self.bump();
        Ok(build(self.unary()?))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Tok::LParen => {
                let open = self.span();
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    let mut err = self.unexpected("')'");
                    err.message.push_str(&format!(" to close '(' at byte {}", open.begin));
                    return Err(err);
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

/// Parses a formula of the ASCII grammar (Unicode aliases accepted).
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = FormulaParser { toks, pos: 0 };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

const LEVEL_IMP: u8 = 1;
const LEVEL_OR: u8 = 2;
const LEVEL_AND: u8 = 3;
const LEVEL_UNARY: u8 = 4;
const LEVEL_ATOM: u8 = 5;

fn render(f: &Formula) -> (String, u8) {
    fn wrap(f: &Formula, min: u8) -> String {
        let (s, level) = render(f);
        if level < min {
            format!("({s})")
        } else {
            s
        }
    }
    fn prefix(op: &str, f: &Formula) -> String {
        let body = wrap(f, LEVEL_UNARY);
        let needs_space = op == "O" && body.starts_with(|c: char| is_ident_char(c));
        if needs_space {
            format!("{op} {body}")
        } else {
            format!("{op}{body}")
        }
    }
    match f {
        Formula::Bottom => ("false".into(), LEVEL_ATOM),
        Formula::Atom(a) => (a.to_string(), LEVEL_ATOM),
        Formula::Implies(l, r) if **r == Formula::Bottom => (prefix("~", l), LEVEL_UNARY),
        Formula::Implies(l, r) => (format!("{} -> {}", wrap(l, LEVEL_OR), wrap(r, LEVEL_IMP)), LEVEL_IMP),
        Formula::Or(l, r) => (format!("{} | {}", wrap(l, LEVEL_OR), wrap(r, LEVEL_AND)), LEVEL_OR),
        Formula::And(l, r) => (format!("{} & {}", wrap(l, LEVEL_AND), wrap(r, LEVEL_UNARY)), LEVEL_AND),
        Formula::Next(g) => (prefix("O", g), LEVEL_UNARY),
        Formula::Eventually(g) => (prefix("<>", g), LEVEL_UNARY),
        Formula::StrongBox(g) => (prefix("[]", g), LEVEL_UNARY),
        Formula::WeakBox(g) => (prefix("[*]", g), LEVEL_UNARY),
    }
}

/// Renders `f` with the fewest parentheses the grammar allows.
pub fn print_formula(f: &Formula) -> String {
    render(f).0
}

/// Splits `text` into lines with their byte offsets, dropping `#` comments.
pub(crate) fn content_lines(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line = raw.trim_end_matches(['\n', '\r']);
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        out.push((offset, line));
        offset += raw.len();
    }
    out
}

/// Whitespace-separated words of `line` with their absolute spans.
pub(crate) fn words(line: &str, offset: usize) -> Vec<(&str, SourceSpan)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((&line[s..i], SourceSpan::new(offset + s, offset + i)));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((&line[s..], SourceSpan::new(offset + s, offset + line.len())));
    }
    out
}

/// Span of `sub`, which must be a subslice of `line`, shifted by `offset`.
pub(crate) fn span_of(line: &str, sub: &str, offset: usize) -> SourceSpan {
    let begin = sub.as_ptr() as usize - line.as_ptr() as usize;
    SourceSpan::new(offset + begin, offset + begin + sub.len())
}

/// Identifier check used by the file formats.
pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_char)
}
