use super::{content_lines, parse_formula, print_formula, span_of, words, ParseError, SourceSpan};
use crate::hilbert::{metavariable, rule, schema, Derivation, Justification, Line, Subst};

/// Parses derivations written one line per step:
///
/// ```text
/// 1. []p -> p ; axiom box-refl {phi:=p}
/// 2. ([]p -> p) -> ([]p -> p) | q ; ipc-taut
/// 3. ([]p -> p) | q ; mp 1 2
/// ```
///
/// Steps are numbered consecutively from 1 and may only cite earlier steps.
pub fn parse_derivation(text: &str) -> Result<Derivation, ParseError> {
    let mut lines = Vec::new();
    for (offset, raw) in content_lines(text) {
        if raw.trim().is_empty() {
            continue;
        }
        let line_span = SourceSpan::new(offset, offset + raw.len());
        let Some(dot) = raw.find('.') else {
            return Err(ParseError::new(line_span, "expected 'N. formula ; justification'"));
        };
        let num_text = raw[..dot].trim();
        let num_span = span_of(raw, num_text, offset);
        let expected = lines.len() + 1;
        match num_text.parse::<usize>() {
            Ok(n) if n == expected => {}
            Ok(n) => return Err(ParseError::new(num_span, format!("expected step {expected}, found {n}"))),
            Err(_) => return Err(ParseError::new(num_span, format!("'{num_text}' is not a step number"))),
        }
        let rest = &raw[dot + 1..];
        let Some(semi) = rest.find(';') else {
            return Err(ParseError::new(line_span, "missing ';' before the justification"));
        };
        let formula_text = &rest[..semi];
        let formula_offset = span_of(raw, formula_text, offset).begin;
        let formula = parse_formula(formula_text).map_err(|e| e.shifted(formula_offset))?;
        let just_text = &rest[semi + 1..];
        let just_offset = span_of(raw, just_text, offset).begin;
        let justification = parse_justification(just_text, just_offset, lines.len())?;
        lines.push(Line { formula, justification, span: line_span });
    }
    if lines.is_empty() {
        return Err(ParseError::new(SourceSpan::new(text.len(), text.len()), "empty derivation"));
    }
    Ok(Derivation { lines })
}

fn parse_justification(text: &str, offset: usize, index: usize) -> Result<Justification, ParseError> {
    let (head, braces) = match text.find('{') {
        Some(i) => (&text[..i], Some(i)),
        None => (text, None),
    };
    let ws = words(head, offset);
    let Some(&(kind, kind_span)) = ws.first() else {
        return Err(ParseError::new(SourceSpan::new(offset, offset + text.len()), "missing justification"));
    };
    match kind {
        "ipc-taut" | "ipc" | "taut" if ws.len() == 1 && braces.is_none() => Ok(Justification::IpcTaut),
        "axiom" => {
            let Some(&(name, name_span)) = ws.get(1) else {
                return Err(ParseError::new(kind_span, "axiom needs a name"));
            };
            if ws.len() > 2 {
                return Err(ParseError::new(ws[2].1, "unexpected text after the axiom name"));
            }
            if name == "i" {
                if braces.is_some() {
                    return Err(ParseError::new(name_span, "axiom i takes no substitution"));
                }
                return Ok(Justification::IpcTaut);
            }
            let Some(s) = schema(name) else {
                return Err(ParseError::new(name_span, format!("unknown axiom '{name}'")));
            };
            let subst = match braces {
                Some(i) => Some(parse_subst(&text[i..], offset + i)?),
                None => None,
            };
            Ok(Justification::Axiom { schema: s.name.to_string(), subst })
        }
        _ => {
            if braces.is_some() {
                return Err(ParseError::new(kind_span, "only axioms take a substitution"));
            }
            let Some(r) = rule(kind) else {
                return Err(ParseError::new(kind_span, format!("unknown rule '{kind}'")));
            };
            let mut premises = Vec::new();
            for &(w, span) in &ws[1..] {
                let n: usize = w.parse().map_err(|_| ParseError::new(span, format!("'{w}' is not a step number")))?;
                if n == 0 || n > index {
                    return Err(ParseError::new(span, format!("step {n} does not precede step {}", index + 1)));
                }
                premises.push(n - 1);
            }
            if premises.len() != r.premises.len() {
                return Err(ParseError::new(
                    kind_span,
                    format!("{} takes {} premise(s), {} given", r.name, r.premises.len(), premises.len()),
                ));
            }
            Ok(Justification::Rule { rule: r.name.to_string(), premises })
        }
    }
}

/// `{phi:=p, psi:=[]q}`
fn parse_subst(text: &str, offset: usize) -> Result<Subst, ParseError> {
    let whole = SourceSpan::new(offset, offset + text.len());
    let trimmed = text.trim_end();
    let inner = trimmed
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| ParseError::new(whole, "substitution must have the form {phi:=F, ...}"))?;
    let mut subst = Subst::new();
    let mut pos = offset + 1;
    for part in inner.split(',') {
        let part_offset = pos;
        pos += part.len() + 1;
        if part.trim().is_empty() {
            continue;
        }
        let span = SourceSpan::new(part_offset, part_offset + part.len());
        let (mv, value) = part.split_once(":=").ok_or_else(|| ParseError::new(span, "expected 'phi:=formula'"))?;
        let canonical = metavariable(mv.trim())
            .ok_or_else(|| ParseError::new(span, format!("'{}' is not a metavariable", mv.trim())))?;
        let f = parse_formula(value).map_err(|e| e.shifted(part_offset + mv.len() + 2))?;
        if subst.insert(canonical.to_string(), f).is_some() {
            return Err(ParseError::new(span, format!("{canonical} substituted twice")));
        }
    }
    Ok(subst)
}

/// Renders a derivation in the format read by [`parse_derivation`].
pub fn print_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    for (i, line) in d.lines.iter().enumerate() {
        let just = match &line.justification {
            Justification::IpcTaut => "ipc-taut".to_string(),
            Justification::Axiom { schema, subst: None } => format!("axiom {schema}"),
            Justification::Axiom { schema, subst: Some(s) } => {
                let parts: Vec<String> = s.iter().map(|(k, v)| format!("{k}:={}", print_formula(v))).collect();
                format!("axiom {schema} {{{}}}", parts.join(", "))
            }
            Justification::Rule { rule, premises } => {
                let ps: Vec<String> = premises.iter().map(|p| (p + 1).to_string()).collect();
                format!("{rule} {}", ps.join(" "))
            }
        };
        out.push_str(&format!("{}. {} ; {}\n", i + 1, print_formula(&line.formula), just));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: &str = "1. []p -> p ; axiom viii {phi:=p}\n\
                     2. ([]p -> p) -> ([]p -> p) | q ; ipc-taut\n\
                     3. ([]p -> p) | q ; mp 1 2 # modus ponens\n";

    #[test]
    fn reads_lines() {
        let d = parse_derivation(D).unwrap();
        assert_eq!(d.lines.len(), 3);
        assert_eq!(
            d.lines[0].justification,
            Justification::Axiom {
                schema: "box-refl".into(),
                subst: Some([("phi".to_string(), crate::formula::Formula::atom("p"))].into_iter().collect()),
            }
        );
        assert_eq!(d.lines[2].justification, Justification::Rule { rule: "mp".into(), premises: vec![0, 1] });
    }

    #[test]
    fn round_trip() {
        let d = parse_derivation(D).unwrap();
        let again = parse_derivation(&print_derivation(&d)).unwrap();
        assert_eq!(print_derivation(&again), print_derivation(&d));
    }

    #[test]
    fn greek_and_axiom_i() {
        let d = parse_derivation("1. p -> p ; axiom i\n2. []q -> q ; axiom box-refl {φ:=q}\n").unwrap();
        assert_eq!(d.lines[0].justification, Justification::IpcTaut);
        assert!(
            matches!(&d.lines[1].justification, Justification::Axiom { subst: Some(s), .. } if s.contains_key("phi"))
        );
    }

    #[test]
    fn errors() {
        assert!(parse_derivation("1. p ; mp 1 1\n").unwrap_err().message.contains("does not precede"));
        assert!(parse_derivation("2. p -> p ; ipc-taut\n").is_err());
        assert!(parse_derivation("1. p -> p ; axiom nonsense\n").is_err());
        assert!(parse_derivation("1. p -> p ; frobnicate 1\n").is_err());
        assert!(parse_derivation("1. p -> p ; ipc-taut\n2. p ; mp 1\n").unwrap_err().message.contains("premise"));
        assert!(parse_derivation("1. []p -> p ; axiom viii {rho:=p}\n").is_err());
        assert!(parse_derivation("").is_err());
        let e = parse_derivation("1. p -> ; ipc-taut\n").unwrap_err();
        assert!(e.span.begin >= 3);
    }
}
