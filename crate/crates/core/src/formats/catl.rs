use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;
use std::path::Path;

use super::caf::parse_caf;
use super::facts::{read_facts, syntax, Fact};
use super::{is_identifier, DiagnosticKind, ParseDiagnostic, Parsed, SourceLocation};
use crate::catl::{CafAtsSystem, CatlError, JointAction};

fn system_error(loc: &SourceLocation) -> impl Fn(CatlError) -> ParseDiagnostic + '_ {
    move |e| ParseDiagnostic::error(e, loc.clone())
}

fn small(fact: &Fact, i: usize) -> Result<u32, ParseDiagnostic> {
    let n = fact.number(i)?;
    u32::try_from(n).map_err(|_| syntax(format!("number {n} is too large"), fact.args[i].loc.clone()))
}

fn index(fact: &Fact, i: usize) -> Result<usize, ParseDiagnostic> {
    let n = fact.number(i)?;
    usize::try_from(n).map_err(|_| syntax(format!("number {n} is too large"), fact.args[i].loc.clone()))
}

fn action(fact: &Fact, i: usize) -> Result<JointAction, ParseDiagnostic> {
    let moves = fact.numbers(i)?;
    let moves = moves
        .into_iter()
        .map(|m| u32::try_from(m).map_err(|_| syntax(format!("move {m} is too large"), fact.args[i].loc.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(JointAction::new(moves))
}

fn name(fact: &Fact, i: usize) -> Result<&str, ParseDiagnostic> {
    let w = fact.word(i)?;
    if is_identifier(w) {
        Ok(w)
    } else {
        Err(syntax(format!("`{w}` is not an identifier"), fact.args[i].loc.clone()))
    }
}

/// Parses a system, reading `caf(k, "path")` files relative to `base_dir`.
pub fn parse_catl(text: &str, base_dir: &Path) -> Result<Parsed<CafAtsSystem>, ParseDiagnostic> {
    parse_catl_with(text, &mut |path: &str| {
        std::fs::read_to_string(base_dir.join(path)).map_err(|e| e.to_string())
    })
}

/// Parses a system, obtaining the text of each referenced control framework
/// from `load`.
///
/// Facts may appear in any order. Warnings are raised for reachable
/// (framework, action) pairs without a model update, but only when the system
/// lists at least one `upsilon` fact.
pub fn parse_catl_with(
    text: &str,
    load: &mut dyn FnMut(&str) -> Result<String, String>,
) -> Result<Parsed<CafAtsSystem>, ParseDiagnostic> {
    let facts = read_facts(text)?;
    let mut agents = BTreeSet::new();
    for f in &facts {
        let arity = match f.name.as_str() {
            "agent" | "state" | "init" => 1,
            "prop" | "caf" | "statecaf" => 2,
            "moves" | "trans" | "upsilon" => 3,
            other => {
                return Err(ParseDiagnostic::error(
                    DiagnosticKind::UnknownFact(other.into()),
                    f.loc.clone(),
                ))
            }
        };
        f.expect_arity(arity)?;
        if f.name == "agent" {
            let i = small(f, 0)?;
            if i == 0 {
                return Err(ParseDiagnostic::error(
                    CatlError::UnknownAgent(0),
                    f.args[0].loc.clone(),
                ));
            }
            agents.insert(i);
        }
    }
    let n = agents.len() as u32;
    let first = facts[0].loc.clone();
    if let Some(&gap) = (1..=n).find(|i| !agents.contains(i)).as_ref() {
        let at = facts
            .iter()
            .find(|f| f.name == "agent")
            .map_or(first.clone(), |f| f.loc.clone());
        return Err(syntax(
            format!("agents must be numbered 1..{n}; agent {gap} is missing"),
            at,
        ));
    }
    let mut b = CafAtsSystem::builder(n).map_err(system_error(&first))?;
    let mut state_locs = HashMap::new();
    let mut warnings = Vec::new();

    for f in &facts {
        match f.name.as_str() {
            "state" => {
                let q = name(f, 0)?;
                b.state(q).map_err(system_error(&f.loc))?;
                state_locs.entry(q.to_string()).or_insert_with(|| f.loc.clone());
            }
            "caf" => {
                let k = index(f, 0)?;
                let path = f.string(1)?;
                let text = load(path).map_err(|reason| {
                    ParseDiagnostic::error(
                        DiagnosticKind::CafLoad {
                            path: path.into(),
                            reason,
                        },
                        f.args[1].loc.clone(),
                    )
                })?;
                let parsed = parse_caf(&text).map_err(|d| {
                    ParseDiagnostic::error(
                        DiagnosticKind::CafLoad {
                            path: path.into(),
                            reason: d.in_file(path).to_string(),
                        },
                        f.args[1].loc.clone(),
                    )
                })?;
                let parsed = parsed.in_file(path);
                warnings.extend(parsed.warnings);
                b.caf(k, path, parsed.value).map_err(system_error(&f.loc))?;
            }
            _ => {}
        }
    }
    for f in &facts {
        let err = system_error(&f.loc);
        match f.name.as_str() {
            "init" => {
                b.initial(name(f, 0)?).map_err(err)?;
            }
            "prop" => {
                b.label(name(f, 0)?, name(f, 1)?).map_err(err)?;
            }
            "moves" => {
                b.moves(name(f, 0)?, small(f, 1)?, small(f, 2)?).map_err(err)?;
            }
            "statecaf" => {
                let k = index(f, 1)?;
                if !b.has_caf(k) {
                    return Err(ParseDiagnostic::error(
                        CatlError::UnknownCafIndex(k),
                        f.args[1].loc.clone(),
                    ));
                }
                b.state_caf(name(f, 0)?, k).map_err(err)?;
            }
            "upsilon" => {
                for i in [0, 2] {
                    let k = index(f, i)?;
                    if !b.has_caf(k) {
                        return Err(ParseDiagnostic::error(
                            CatlError::UnknownCafIndex(k),
                            f.args[i].loc.clone(),
                        ));
                    }
                }
                b.model_update(index(f, 0)?, action(f, 1)?, index(f, 2)?).map_err(err)?;
            }
            _ => {}
        }
    }
    for f in facts.iter().filter(|f| f.name == "trans") {
        b.transition(name(f, 0)?, action(f, 1)?, name(f, 2)?)
            .map_err(system_error(&f.loc))?;
    }

    let system = b.build().map_err(|e| {
        let loc = match &e {
            CatlError::NonTotalTransition { state, .. } => state_locs.get(state).cloned(),
            _ => None,
        };
        ParseDiagnostic::error(e, loc.unwrap_or_else(|| first.clone()))
    })?;

    if let Some(up) = facts.iter().find(|f| f.name == "upsilon") {
        for (caf, action) in system.unlisted_model_updates() {
            warnings.push(ParseDiagnostic::warning(
                DiagnosticKind::MissingModelUpdate {
                    caf,
                    action: action.to_string(),
                },
                up.loc.clone(),
            ));
        }
    }
    Ok(Parsed {
        value: system,
        warnings,
    })
}

fn tuple(a: &JointAction) -> String {
    a.to_string()
}

/// Canonical system text. Framework files are referenced by their recorded
/// source paths, not inlined.
pub fn serialize_catl(sys: &CafAtsSystem) -> String {
    let mut out = String::new();
    for a in sys.agents() {
        let _ = writeln!(out, "agent({a}).");
    }
    for q in sys.states() {
        let _ = writeln!(out, "state({q}).");
    }
    let _ = writeln!(out, "init({}).", sys.initial_state());
    for (k, entry) in sys.cafs().iter().enumerate() {
        let _ = writeln!(out, "caf({k}, \"{}\").", entry.source);
    }
    for (i, q) in sys.states().iter().enumerate() {
        let _ = writeln!(out, "statecaf({q},{}).", sys.state_caf(i));
    }
    for (i, q) in sys.states().iter().enumerate() {
        for a in sys.agents() {
            let _ = writeln!(out, "moves({q},{a},{}).", sys.move_count(i, a));
        }
    }
    for (i, q) in sys.states().iter().enumerate() {
        for p in sys.label(i) {
            let _ = writeln!(out, "prop({q},{p}).");
        }
    }
    for (i, q) in sys.states().iter().enumerate() {
        for rank in 0..sys.action_count(i) {
            let next = &sys.states()[sys.successor(i, rank)];
            let _ = writeln!(out, "trans({q},{},{next}).", tuple(&sys.action_at(i, rank)));
        }
    }
    for ((k, action), next) in sys.model_updates() {
        let _ = writeln!(out, "upsilon({k},{},{next}).", tuple(action));
    }
    out
}
