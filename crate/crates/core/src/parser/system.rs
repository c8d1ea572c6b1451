use std::collections::BTreeMap;

use num::{BigInt, One, Zero};

use super::{content_lines, is_identifier, span_of, ParseError, SourceSpan};
use crate::realline::{
    fmt_rational, Affine, Caps, Interval, IntervalSet, Lower, PiecewiseAffineMap, Rational, RealSystem, Upper,
};

/// Parses `3`, `-1/2`, `0.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (neg, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let int = |s: &str| -> Option<BigInt> {
        (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok()).flatten()
    };
    let value = if let Some((n, d)) = digits.split_once('/') {
        let d = int(d)?;
        if d.is_zero() {
            return None;
        }
        Rational::new(int(n)?, d)
    } else if let Some((w, f)) = digits.split_once('.') {
        let whole = if w.is_empty() { BigInt::zero() } else { int(w)? };
        let frac = int(f)?;
        let scale = num::pow(BigInt::from(10), f.len());
        Rational::new(whole * &scale + frac, scale)
    } else {
        Rational::from_integer(int(digits)?)
    };
    Some(if neg { -value } else { value })
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn here(&self, len: usize) -> SourceSpan {
        let end = (self.pos + len).min(self.text.len());
        SourceSpan::new(self.offset + self.pos, self.offset + end)
    }

    fn error(&mut self, msg: impl Into<String>) -> ParseError {
        self.skip_ws();
        let len = self.text[self.pos..].chars().next().map_or(0, char::len_utf8);
        ParseError::new(self.here(len), msg)
    }

    /// A run of characters that may form a number or `inf`.
    fn word(&mut self) -> (&'a str, SourceSpan) {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_alphanumeric() || c == '.' || c == '/' || ((c == '-' || c == '+') && i == 0)))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        (&rest[..len], SourceSpan::new(self.offset + start, self.offset + start + len))
    }
}

enum End {
    NegInf,
    PosInf,
    Finite(Rational),
}

fn parse_end(c: &mut Cursor) -> Result<End, ParseError> {
    let (w, span) = c.word();
    match w {
        "-inf" => Ok(End::NegInf),
        "inf" | "+inf" => Ok(End::PosInf),
        _ => parse_rational(w)
            .map(End::Finite)
            .ok_or_else(|| ParseError::new(span, format!("expected a rational, 'inf' or '-inf', found '{w}'"))),
    }
}

fn parse_interval(c: &mut Cursor) -> Result<Interval, ParseError> {
    let start = c.here(1);
    let closed_lo = if c.eat("[") {
        true
    } else if c.eat("(") {
        false
    } else {
        return Err(c.error("expected '(' or '['"));
    };
    let lo = parse_end(c)?;
    if !c.eat(",") {
        return Err(c.error("expected ','"));
    }
    let hi = parse_end(c)?;
    let closed_hi = if c.eat("]") {
        true
    } else if c.eat(")") {
        false
    } else {
        return Err(c.error("expected ')' or ']'"));
    };
    let span = SourceSpan::new(start.begin, c.offset + c.pos);
    let lower = match lo {
        End::NegInf if closed_lo => return Err(ParseError::new(span, "an infinite end cannot be included")),
        End::NegInf => Lower::Unbounded,
        End::PosInf => return Err(ParseError::new(span, "lower end cannot be inf")),
        End::Finite(v) if closed_lo => Lower::Closed(v),
        End::Finite(v) => Lower::Open(v),
    };
    let upper = match hi {
        End::PosInf if closed_hi => return Err(ParseError::new(span, "an infinite end cannot be included")),
        End::PosInf => Upper::Unbounded,
        End::NegInf => return Err(ParseError::new(span, "upper end cannot be -inf")),
        End::Finite(v) if closed_hi => Upper::Closed(v),
        End::Finite(v) => Upper::Open(v),
    };
    Interval::new(lower, upper).ok_or_else(|| ParseError::new(span, "empty interval"))
}

fn interval_set_at(text: &str, offset: usize) -> Result<IntervalSet, ParseError> {
    let t = text.trim();
    if t == "empty" || t == "{}" || t == "∅" || t.is_empty() {
        return Ok(IntervalSet::empty());
    }
    let mut c = Cursor { text, pos: 0, offset };
    let mut parts = vec![parse_interval(&mut c)?];
    while c.peek().is_some() {
        if !(c.eat("u") || c.eat("∪")) {
            return Err(c.error("expected 'u' between intervals"));
        }
        parts.push(parse_interval(&mut c)?);
    }
    Ok(IntervalSet::from_intervals(parts))
}

/// Parses `(a, b) u [c, d]`, with `-inf`/`inf` ends; `empty` denotes the
/// empty set.
pub fn parse_interval_set(text: &str) -> Result<IntervalSet, ParseError> {
    interval_set_at(text, 0)
}

/// Linear expressions in `x` such as `2*x - 1/2`, `x/3 + 1` or `-x`.
pub fn parse_affine(text: &str) -> Result<Affine, ParseError> {
    affine_at(text, 0)
}

fn affine_at(text: &str, offset: usize) -> Result<Affine, ParseError> {
    let mut c = Cursor { text, pos: 0, offset };
    let a = affine_sum(&mut c)?;
    if c.peek().is_some() {
        return Err(c.error("unexpected input in affine expression"));
    }
    Ok(a)
}

fn affine_sum(c: &mut Cursor) -> Result<Affine, ParseError> {
    let mut acc = affine_product(c)?;
    loop {
        if c.eat("+") {
            let t = affine_product(c)?;
            acc = Affine::new(acc.slope + t.slope, acc.intercept + t.intercept);
        } else if c.eat("-") {
            let t = affine_product(c)?;
            acc = Affine::new(acc.slope - t.slope, acc.intercept - t.intercept);
        } else {
            return Ok(acc);
        }
    }
}

fn affine_product(c: &mut Cursor) -> Result<Affine, ParseError> {
    let mut acc = affine_unary(c)?;
    loop {
        let at = c.here(1);
        if c.eat("*") {
            let f = affine_unary(c)?;
            acc = if f.slope.is_zero() {
                Affine::new(acc.slope * &f.intercept, acc.intercept * &f.intercept)
            } else if acc.slope.is_zero() {
                Affine::new(f.slope * &acc.intercept, f.intercept * &acc.intercept)
            } else {
                return Err(ParseError::new(at, "the map must be affine in x"));
            };
        } else if c.eat("/") {
            let f = affine_unary(c)?;
            if !f.slope.is_zero() || f.intercept.is_zero() {
                return Err(ParseError::new(at, "division only by a nonzero constant"));
            }
            acc = Affine::new(acc.slope / &f.intercept, acc.intercept / &f.intercept);
        } else if c.peek() == Some('x') || c.peek() == Some('(') {
            // implicit product as in `2x`
            let f = affine_unary(c)?;
            if !acc.slope.is_zero() && !f.slope.is_zero() {
                return Err(ParseError::new(at, "the map must be affine in x"));
            }
            acc = if acc.slope.is_zero() {
                Affine::new(f.slope * &acc.intercept, f.intercept * &acc.intercept)
            } else {
                Affine::new(acc.slope * &f.intercept, acc.intercept * &f.intercept)
            };
        } else {
            return Ok(acc);
        }
    }
}

fn affine_unary(c: &mut Cursor) -> Result<Affine, ParseError> {
    if c.eat("-") {
        let a = affine_unary(c)?;
        return Ok(Affine::new(-a.slope, -a.intercept));
    }
    if c.eat("+") {
        return affine_unary(c);
    }
    if c.eat("(") {
        let a = affine_sum(c)?;
        if !c.eat(")") {
            return Err(c.error("expected ')'"));
        }
        return Ok(a);
    }
    if c.eat("x") {
        return Ok(Affine::new(Rational::one(), Rational::zero()));
    }
    c.skip_ws();
    let start = c.pos;
    let rest = &c.text[start..];
    let len = rest.find(|ch: char| !(ch.is_ascii_digit() || ch == '.')).unwrap_or(rest.len());
    let span = SourceSpan::new(c.offset + start, c.offset + start + len.max(1).min(rest.len().max(len)));
    let value = parse_rational(&rest[..len]).ok_or_else(|| ParseError::new(span, "expected a number, 'x' or '('"))?;
    c.pos += len;
    Ok(Affine::constant(value))
}

/// `x<=b`, `x>a`, `a<x<=b` and the like.
fn parse_guard(text: &str, span: SourceSpan) -> Result<Interval, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || ParseError::new(span, format!("bad guard '{}'", text.trim()));
    let (left, right) = compact.split_once('x').ok_or_else(err)?;
    if right.contains('x') {
        return Err(err());
    }
    let mut lower = Lower::Unbounded;
    let mut upper = Upper::Unbounded;
    if !left.is_empty() {
        if let Some(a) = left.strip_suffix("<=") {
            lower = Lower::Closed(parse_rational(a).ok_or_else(err)?);
        } else if let Some(a) = left.strip_suffix('<') {
            lower = Lower::Open(parse_rational(a).ok_or_else(err)?);
        } else {
            return Err(err());
        }
    }
    if !right.is_empty() {
        if let Some(b) = right.strip_prefix("<=") {
            upper = Upper::Closed(parse_rational(b).ok_or_else(err)?);
        } else if let Some(b) = right.strip_prefix('<') {
            upper = Upper::Open(parse_rational(b).ok_or_else(err)?);
        } else if !left.is_empty() {
            return Err(err());
        } else if let Some(a) = right.strip_prefix(">=") {
            lower = Lower::Closed(parse_rational(a).ok_or_else(err)?);
        } else if let Some(a) = right.strip_prefix('>') {
            lower = Lower::Open(parse_rational(a).ok_or_else(err)?);
        } else {
            return Err(err());
        }
    }
    Interval::new(lower, upper).ok_or_else(|| ParseError::new(span, "guard describes an empty set"))
}

fn parse_map(body: &str, offset: usize) -> Result<PiecewiseAffineMap, ParseError> {
    let trimmed = body.trim_start();
    let Some(rest) = trimmed.strip_prefix("piecewise") else {
        return Ok(PiecewiseAffineMap::affine(affine_at(body, offset)?));
    };
    let rest_offset = offset + (body.len() - rest.len());
    let mut pieces: Vec<(Interval, Affine, SourceSpan)> = Vec::new();
    let mut pos = 0;
    for part in rest.split(';') {
        let part_offset = rest_offset + pos;
        pos += part.len() + 1;
        let span = SourceSpan::new(part_offset, part_offset + part.len());
        let (guard, expr) =
            part.split_once(':').ok_or_else(|| ParseError::new(span, "expected 'guard : expression'"))?;
        let g = parse_guard(guard, span)?;
        let a = affine_at(expr, part_offset + guard.len() + 1)?;
        pieces.push((g, a, span));
    }
    pieces.sort_by(|a, b| match (a.0.lower.value(), b.0.lower.value()) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, _) => std::cmp::Ordering::Less,
        (_, None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(y),
    });
    if pieces[0].0.lower != Lower::Unbounded {
        return Err(ParseError::new(pieces[0].2, "pieces must cover the whole line from -inf"));
    }
    if pieces.last().unwrap().0.upper != Upper::Unbounded {
        return Err(ParseError::new(pieces.last().unwrap().2, "pieces must cover the whole line up to inf"));
    }
    let mut breakpoints = Vec::new();
    for w in pieces.windows(2) {
        let (a, b) = (&w[0].0, &w[1].0);
        let (Some(u), Some(l)) = (a.upper.value(), b.lower.value()) else {
            return Err(ParseError::new(w[1].2, "overlapping pieces"));
        };
        let touching = u == l && (matches!(a.upper, Upper::Closed(_)) || matches!(b.lower, Lower::Closed(_)));
        if !touching {
            return Err(ParseError::new(w[1].2, format!("pieces leave a gap or overlap near {}", fmt_rational(u))));
        }
        breakpoints.push(u.clone());
    }
    let span = SourceSpan::new(offset, offset + body.len());
    PiecewiseAffineMap::new(breakpoints, pieces.into_iter().map(|p| p.1).collect())
        .map_err(|e| ParseError::new(span, e.to_string()))
}

fn parse_caps(body: &str, offset: usize) -> Result<Caps, ParseError> {
    let mut caps = Caps::default();
    for (w, span) in super::words(body, offset) {
        let (k, v) = w.split_once('=').ok_or_else(|| ParseError::new(span, "expected key=value"))?;
        let n: usize = v.parse().map_err(|_| ParseError::new(span, format!("'{v}' is not a count")))?;
        match k {
            "iter" => caps.iter = n,
            "restart" => caps.restart = n,
            "orbit" => caps.orbit = n,
            "window" if n >= 2 => caps.window = n,
            "window" => return Err(ParseError::new(span, "window must be at least 2")),
            "parts" => caps.parts = n,
            _ => return Err(ParseError::new(span, format!("unknown cap '{k}'"))),
        }
    }
    Ok(caps)
}

/// Parses the caps syntax used on the command line, `iter=64 restart=8`,
/// also accepting commas as separators.
pub fn parse_caps_text(text: &str) -> Result<Caps, ParseError> {
    parse_caps(&text.replace(',', " "), 0)
}

/// Parses the real-system format:
///
/// ```text
/// map: piecewise x<=0 : 0 ; x>0 : 2*x
/// val p: (-inf, 1)
/// caps: iter=64 restart=8 orbit=128
/// ```
pub fn parse_real_system(text: &str) -> Result<RealSystem, ParseError> {
    let mut map = None;
    let mut caps = None;
    let mut vals: BTreeMap<String, (IntervalSet, SourceSpan)> = BTreeMap::new();
    for (offset, line) in content_lines(text) {
        if line.trim().is_empty() {
            continue;
        }
        let line_span = SourceSpan::new(offset, offset + line.len());
        let (key, body) = line
            .split_once(':')
            .ok_or_else(|| ParseError::new(line_span, "expected 'map:', 'val <atom>:' or 'caps:'"))?;
        let body_offset = span_of(line, body, offset).begin;
        let key_span = SourceSpan::new(offset, offset + key.len());
        let key: Vec<&str> = key.split_whitespace().collect();
        match key.as_slice() {
            ["map"] => {
                if map.is_some() {
                    return Err(ParseError::new(key_span, "duplicate 'map:' line"));
                }
                map = Some(parse_map(body, body_offset)?);
            }
            ["caps"] => caps = Some(parse_caps(body, body_offset)?),
            ["val", atom] => {
                if !is_identifier(atom) || *atom == "false" || *atom == "O" {
                    return Err(ParseError::new(key_span, format!("invalid atom name '{atom}'")));
                }
                if vals.contains_key(*atom) {
                    return Err(ParseError::new(key_span, format!("duplicate valuation of '{atom}'")));
                }
                let set = interval_set_at(body, body_offset)?;
                if !set.is_open() {
                    return Err(ParseError::new(line_span, format!("valuation of '{atom}' must be open, got {set}")));
                }
                vals.insert(atom.to_string(), (set, line_span));
            }
            _ => return Err(ParseError::new(key_span, "expected 'map:', 'val <atom>:' or 'caps:'")),
        }
    }
    let map = map.ok_or_else(|| ParseError::new(SourceSpan::new(text.len(), text.len()), "missing 'map:' line"))?;
    let valuation = vals.into_iter().map(|(k, (s, _))| (k, s)).collect();
    RealSystem::new(map, valuation, caps.unwrap_or_default())
        .map_err(|e| ParseError::new(SourceSpan::default(), e.to_string()))
}

/// Renders a system in the format read by [`parse_real_system`].
pub fn print_real_system(sys: &RealSystem) -> String {
    let mut out = format!("map: {}\n", sys.map);
    for (atom, set) in sys.valuation() {
        out.push_str(&format!("val {atom}: {set}\n"));
    }
    if sys.caps != Caps::default() {
        out.push_str(&format!("caps: {}\n", sys.caps));
    }
    out
}
