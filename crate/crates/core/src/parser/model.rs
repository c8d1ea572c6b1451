use std::collections::BTreeMap;

use super::{content_lines, is_identifier, words, ParseError, SourceSpan};
use crate::poset::{DynamicPoset, PosetModel, WorldSet};

/// Parses the line-based model format:
///
/// ```text
/// worlds: w v u
/// order: v<=u          # reflexive pairs optional, transitive pairs required
/// step: w->v v->v u->u
/// val p: u
/// val q:
/// ```
pub fn parse_poset_model(text: &str) -> Result<PosetModel, ParseError> {
    let mut worlds: Option<(Vec<String>, SourceSpan)> = None;
    let mut order: Option<(Vec<(usize, usize)>, SourceSpan)> = None;
    let mut step: Option<(Vec<Option<usize>>, SourceSpan)> = None;
    let mut vals: BTreeMap<String, (WorldSet, SourceSpan)> = BTreeMap::new();

    for (offset, line) in content_lines(text) {
        if line.trim().is_empty() {
            continue;
        }
        let Some(colon) = line.find(':') else {
            let span = SourceSpan::new(offset, offset + line.len());
            return Err(ParseError::new(span, "expected 'worlds:', 'order:', 'step:' or 'val <atom>:'"));
        };
        let key_span = SourceSpan::new(offset, offset + colon);
        let key: Vec<&str> = line[..colon].split_whitespace().collect();
        let body_offset = offset + colon + 1;
        let body = words(&line[colon + 1..], body_offset);
        let lookup = |names: &[String], w: &str, span: SourceSpan| -> Result<usize, ParseError> {
            names.iter().position(|n| n == w).ok_or_else(|| ParseError::new(span, format!("unknown world '{w}'")))
        };
        let need_worlds = || {
            worlds
                .as_ref()
                .map(|(w, _)| w.clone())
                .ok_or_else(|| ParseError::new(key_span, "'worlds:' must come first"))
        };
        match key.as_slice() {
            ["worlds"] => {
                if worlds.is_some() {
                    return Err(ParseError::new(key_span, "duplicate 'worlds:' line"));
                }
                let mut names = Vec::new();
                for (w, span) in &body {
                    if !is_identifier(w) {
                        return Err(ParseError::new(*span, format!("invalid world name '{w}'")));
                    }
                    if names.iter().any(|n| n == w) {
                        return Err(ParseError::new(*span, format!("duplicate world '{w}'")));
                    }
                    names.push(w.to_string());
                }
                if names.is_empty() {
                    return Err(ParseError::new(key_span, "at least one world required"));
                }
                worlds = Some((names, key_span));
            }
            ["order"] => {
                let names = need_worlds()?;
                if order.is_some() {
                    return Err(ParseError::new(key_span, "duplicate 'order:' line"));
                }
                let mut pairs = Vec::new();
                for (tok, span) in &body {
                    let Some((a, b)) = tok.split_once("<=") else {
                        return Err(ParseError::new(*span, format!("expected 'a<=b', found '{tok}'")));
                    };
                    pairs.push((lookup(&names, a, *span)?, lookup(&names, b, *span)?));
                }
                order = Some((pairs, key_span));
            }
            ["step"] => {
                let names = need_worlds()?;
                if step.is_some() {
                    return Err(ParseError::new(key_span, "duplicate 'step:' line"));
                }
                let mut map = vec![None; names.len()];
                for (tok, span) in &body {
                    let Some((a, b)) = tok.split_once("->") else {
                        return Err(ParseError::new(*span, format!("expected 'a->b', found '{tok}'")));
                    };
                    let (a, b) = (lookup(&names, a, *span)?, lookup(&names, b, *span)?);
                    if map[a].is_some() {
                        return Err(ParseError::new(*span, format!("second successor for '{}'", names[a])));
                    }
                    map[a] = Some(b);
                }
                step = Some((map, key_span));
            }
            ["val", atom] => {
                let names = need_worlds()?;
                if !is_identifier(atom) || *atom == "false" || *atom == "O" {
                    return Err(ParseError::new(key_span, format!("invalid atom name '{atom}'")));
                }
                if vals.contains_key(*atom) {
                    return Err(ParseError::new(key_span, format!("duplicate valuation of '{atom}'")));
                }
                let mut set = WorldSet::EMPTY;
                for (w, span) in &body {
                    set = set.with(lookup(&names, w, *span)?);
                }
                vals.insert(atom.to_string(), (set, key_span));
            }
            _ => return Err(ParseError::new(key_span, format!("unknown section '{}'", line[..colon].trim()))),
        }
    }

    let end = SourceSpan::new(text.len(), text.len());
    let (names, worlds_span) = worlds.ok_or_else(|| ParseError::new(end, "at least one world required"))?;
    let (step, step_span) = step.ok_or_else(|| ParseError::new(end, "missing 'step:' line"))?;
    if let Some(w) = step.iter().position(Option::is_none) {
        return Err(ParseError::new(step_span, format!("no successor given for '{}'", names[w])));
    }
    let step: Vec<usize> = step.into_iter().map(Option::unwrap).collect();
    let (pairs, order_span) = order.unwrap_or((Vec::new(), worlds_span));
    let frame = DynamicPoset::new(names, &pairs, step).map_err(|e| ParseError::new(order_span, e.to_string()))?;
    let mut assignment = BTreeMap::new();
    let mut spans = BTreeMap::new();
    for (atom, (set, span)) in vals {
        spans.insert(atom.clone(), span);
        assignment.insert(atom, set);
    }
    PosetModel::new(frame, assignment).map_err(|e| {
        let span = match &e {
            crate::poset::ModelError::NotUpSet { atom, .. } => spans[atom],
            _ => worlds_span,
        };
        ParseError::new(span, e.to_string())
    })
}

/// Renders a model in the format read by [`parse_poset_model`].
pub fn print_poset_model(model: &PosetModel) -> String {
    let frame = &model.frame;
    let mut out = String::new();
    out.push_str(&format!("worlds: {}\n", frame.names().join(" ")));
    let pairs: Vec<String> =
        frame.order_pairs().iter().map(|&(a, b)| format!("{}<={}", frame.name(a), frame.name(b))).collect();
    out.push_str(&format!("order: {}\n", pairs.join(" ")).replace(": \n", ":\n"));
    let steps: Vec<String> =
        (0..frame.len()).map(|w| format!("{}->{}", frame.name(w), frame.name(frame.step(w)))).collect();
    out.push_str(&format!("step: {}\n", steps.join(" ")));
    for (atom, set) in model.valuation.iter() {
        let ws = frame.names_of(set.set()).join(" ");
        out.push_str(format!("val {atom}: {ws}").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: &str = "# comment\nworlds: w v u\norder: w<=w v<=v u<=u v<=u\nstep: w->v v->v u->u\nval p: u\nval q:\n";

    #[test]
    fn reads_three_world_model() {
        let m = parse_poset_model(FS).unwrap();
        assert_eq!(m.frame.len(), 3);
        assert!(m.frame.leq(1, 2));
        assert_eq!(m.frame.step(0), 1);
        assert_eq!(m.valuation.get("p").set(), WorldSet::singleton(2));
        assert!(m.valuation.get("q").set().is_empty());
    }

    #[test]
    fn round_trip() {
        let m = parse_poset_model(FS).unwrap();
        let again = parse_poset_model(&print_poset_model(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn empty_worlds() {
        let e = parse_poset_model("worlds:\nstep:\n").unwrap_err();
        assert_eq!(e.message, "at least one world required");
        let e = parse_poset_model("").unwrap_err();
        assert_eq!(e.message, "at least one world required");
    }

    #[test]
    fn errors() {
        assert!(parse_poset_model("worlds: a b\nstep: a->a\n").unwrap_err().message.contains("no successor"));
        assert!(parse_poset_model("worlds: a\nstep: a->b\n").unwrap_err().message.contains("unknown world"));
        let e = parse_poset_model("worlds: a b c\norder: a<=b b<=c\nstep: a->a b->b c->c\n").unwrap_err();
        assert!(e.message.contains("transitivity"));
        let e = parse_poset_model("worlds: a b\norder: a<=b\nstep: a->a b->b\nval p: a\n").unwrap_err();
        assert!(e.message.contains("not upward closed"));
        assert!(parse_poset_model("worlds: a\nstep: a->a\nfoo: a\n").is_err());
    }
}
