use std::collections::{BTreeSet, HashSet};

use super::facts::{read_facts, Fact};
use super::{DiagnosticKind, ParseDiagnostic};
use crate::af::{AfError, ArgumentId, ArgumentationFramework};

fn argument(fact: &Fact, i: usize) -> Result<ArgumentId, ParseDiagnostic> {
    let w = fact.word(i)?;
    ArgumentId::new(w).map_err(|e| ParseDiagnostic::error(e, fact.args[i].loc.clone()))
}

/// `arg(X).` and `att(X,Y).` facts; arguments may be declared after the
/// attacks that mention them, but every attack endpoint must be declared.
pub fn parse_apx(text: &str) -> Result<ArgumentationFramework, ParseDiagnostic> {
    let facts = read_facts(text)?;
    let mut args = Vec::new();
    let mut seen = HashSet::new();
    for f in &facts {
        match f.name.as_str() {
            "arg" => {
                f.expect_arity(1)?;
                let a = argument(f, 0)?;
                if !seen.insert(a.clone()) {
                    return Err(ParseDiagnostic::error(
                        AfError::DuplicateArgument(a.to_string()),
                        f.loc.clone(),
                    ));
                }
                args.push(a);
            }
            "att" => f.expect_arity(2)?,
            other => {
                return Err(ParseDiagnostic::error(
                    DiagnosticKind::UnknownFact(other.into()),
                    f.loc.clone(),
                ))
            }
        }
    }
    let mut attacks = Vec::new();
    for f in facts.iter().filter(|f| f.name == "att") {
        let mut pair = [0, 1].map(|i| argument(f, i));
        for (i, p) in pair.iter_mut().enumerate() {
            if let Ok(a) = p {
                if !seen.contains(a) {
                    *p = Err(ParseDiagnostic::error(
                        DiagnosticKind::UndeclaredArgument(a.to_string()),
                        f.args[i].loc.clone(),
                    ));
                }
            }
        }
        let [from, to] = pair;
        attacks.push((from?, to?));
    }
    ArgumentationFramework::new(args, attacks).map_err(|e| ParseDiagnostic::error(e, facts[0].loc.clone()))
}

/// Canonical APX: arguments, then attacks, each sorted by name.
pub fn serialize_apx(af: &ArgumentationFramework) -> String {
    let mut out = String::new();
    let names: BTreeSet<&ArgumentId> = af.arguments().iter().collect();
    for a in names {
        out.push_str(&format!("arg({a}).\n"));
    }
    let attacks: BTreeSet<_> = af.attack_names().collect();
    for (a, b) in attacks {
        out.push_str(&format!("att({a},{b}).\n"));
    }
    out
}
