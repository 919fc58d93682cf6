use std::collections::{BTreeSet, HashSet};

use super::facts::syntax;
use super::{DiagnosticKind, ParseDiagnostic, SourceLocation};
use crate::af::{AfError, ArgumentId, ArgumentationFramework};

/// Whitespace-separated tokens of one line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_ascii_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

/// Node lines, one `#` line, then `X Y` edge lines. `%` starts a comment.
pub fn parse_tgf(text: &str) -> Result<ArgumentationFramework, ParseDiagnostic> {
    let mut args = Vec::new();
    let mut seen = HashSet::new();
    let mut attacks = Vec::new();
    let mut in_edges = false;
    let mut any = false;
    let mut end = SourceLocation::new(1, 1);
    for (n, raw) in text.split('\n').enumerate() {
        let line_no = n + 1;
        end = SourceLocation::new(line_no, raw.len() + 1);
        if let Some(col) = raw.bytes().position(|b| !b.is_ascii()) {
            return Err(syntax("non-ASCII character", SourceLocation::new(line_no, col + 1)));
        }
        let line = raw.split('%').next().unwrap_or("");
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        any = true;
        let loc = |col| SourceLocation::new(line_no, col);
        if toks.len() == 1 && toks[0].1 == "#" {
            if in_edges {
                return Err(syntax("second `#` separator", loc(toks[0].0)));
            }
            in_edges = true;
            continue;
        }
        let mut ids = Vec::new();
        for &(col, t) in &toks {
            let id = ArgumentId::new(t).map_err(|e| ParseDiagnostic::error(e, loc(col)))?;
            if in_edges && !seen.contains(&id) {
                return Err(ParseDiagnostic::error(
                    DiagnosticKind::UndeclaredArgument(t.into()),
                    loc(col),
                ));
            }
            ids.push(id);
        }
        if in_edges {
            if ids.len() != 2 {
                return Err(syntax("edge lines hold exactly two node ids", loc(toks[0].0)));
            }
            let to = ids.pop().unwrap();
            attacks.push((ids.pop().unwrap(), to));
        } else {
            if ids.len() != 1 {
                return Err(syntax("node lines hold exactly one id", loc(toks[1].0)));
            }
            let id = ids.pop().unwrap();
            if !seen.insert(id.clone()) {
                return Err(ParseDiagnostic::error(
                    AfError::DuplicateArgument(id.to_string()),
                    loc(toks[0].0),
                ));
            }
            args.push(id);
        }
    }
    if !any {
        return Err(ParseDiagnostic::error(
            DiagnosticKind::EmptyInput,
            SourceLocation::new(1, 1),
        ));
    }
    if !in_edges {
        return Err(ParseDiagnostic::error(DiagnosticKind::MissingSeparator, end));
    }
    ArgumentationFramework::new(args, attacks).map_err(|e| ParseDiagnostic::error(e, SourceLocation::new(1, 1)))
}

/// Canonical TGF: sorted node ids, `#`, sorted edges.
pub fn serialize_tgf(af: &ArgumentationFramework) -> String {
    let mut out = String::new();
    let names: BTreeSet<&ArgumentId> = af.arguments().iter().collect();
    for a in names {
        out.push_str(&format!("{a}\n"));
    }
    out.push_str("#\n");
    let attacks: BTreeSet<_> = af.attack_names().collect();
    for (a, b) in attacks {
        out.push_str(&format!("{a} {b}\n"));
    }
    out
}
