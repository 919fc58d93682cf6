use std::collections::BTreeSet;

use super::facts::{read_facts, Fact};
use super::{DiagnosticKind, ParseDiagnostic, Parsed};
use crate::af::ArgumentId;
use crate::caf::{CafError, ControlFramework, Part};

fn at(fact: &Fact, i: usize) -> impl Fn(CafError) -> ParseDiagnostic + '_ {
    move |e| {
        // point at the offending argument where there is one
        let loc = match &e {
            CafError::UnknownArgument(name) => {
                let k = (0..fact.args.len())
                    .find(|&k| fact.word(k).ok() == Some(name.as_str()))
                    .unwrap_or(i);
                return ParseDiagnostic::error(
                    DiagnosticKind::UndeclaredArgument(name.clone()),
                    fact.args[k].loc.clone(),
                );
            }
            _ => fact.loc.clone(),
        };
        ParseDiagnostic::error(e, loc)
    }
}

/// `farg`/`uarg`/`carg` declarations and `att`/`uatt`/`satt` attacks, in any
/// order. A repeated `satt` pair (in either orientation) is a warning.
pub fn parse_caf(text: &str) -> Result<Parsed<ControlFramework>, ParseDiagnostic> {
    let facts = read_facts(text)?;
    let mut b = ControlFramework::builder();
    for f in &facts {
        let part = match f.name.as_str() {
            "farg" => Part::Fixed,
            "uarg" => Part::Uncertain,
            "carg" => Part::Control,
            "att" | "uatt" | "satt" => {
                f.expect_arity(2)?;
                continue;
            }
            other => {
                return Err(ParseDiagnostic::error(
                    DiagnosticKind::UnknownFact(other.into()),
                    f.loc.clone(),
                ))
            }
        };
        f.expect_arity(1)?;
        let name = ArgumentId::new(f.word(0)?).map_err(|e| ParseDiagnostic::error(e, f.args[0].loc.clone()))?;
        b.argument(name, part).map_err(at(f, 0))?;
    }
    let mut warnings = Vec::new();
    for f in &facts {
        match f.name.as_str() {
            "att" => {
                b.attack(f.word(0)?, f.word(1)?).map_err(at(f, 0))?;
            }
            "uatt" => {
                b.uncertain_attack(f.word(0)?, f.word(1)?).map_err(at(f, 0))?;
            }
            "satt" => {
                let (x, y) = (f.word(0)?, f.word(1)?);
                if !b.symmetric_attack(x, y).map_err(at(f, 0))? {
                    warnings.push(ParseDiagnostic::warning(
                        DiagnosticKind::DuplicateSymmetricAttack(x.into(), y.into()),
                        f.loc.clone(),
                    ));
                }
            }
            _ => {}
        }
    }
    let value = b.build().map_err(at(&facts[0], 0))?;
    Ok(Parsed { value, warnings })
}

/// Canonical form: parts (fixed, uncertain, control), then certain,
/// uncertain and symmetric attacks, each block sorted.
pub fn serialize_caf(caf: &ControlFramework) -> String {
    let mut out = String::new();
    for (fact, args) in [
        ("farg", caf.fixed_arguments()),
        ("uarg", caf.uncertain_arguments()),
        ("carg", caf.control_arguments()),
    ] {
        for a in args {
            out.push_str(&format!("{fact}({a}).\n"));
        }
    }
    let certain: BTreeSet<_> = caf.fixed_attacks().union(caf.control_attacks()).collect();
    for (fact, pairs) in [
        ("att", certain),
        ("uatt", caf.uncertain_attacks().iter().collect()),
        ("satt", caf.symmetric_attacks().iter().collect()),
    ] {
        for (a, b) in pairs {
            out.push_str(&format!("{fact}({a},{b}).\n"));
        }
    }
    out
}
