use std::collections::BTreeSet;
use std::fmt;

use super::AgentId;
use crate::af::ArgumentId;

/// Coalition-logic formulas.
///
/// `Implies` is evaluated globally: it holds at a state iff, at every state of
/// the system, the antecedent entails the consequent. Disjunction is provided
/// only as a constructor over negation and conjunction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    /// Acceptance of the argument is controllable in the state's framework.
    Zeta(ArgumentId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Coalition(BTreeSet<AgentId>, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn zeta(arg: ArgumentId) -> Self {
        Formula::Zeta(arg)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    /// `a | b` as `!(!a & !b)`.
    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(lhs), Formula::not(rhs)))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn coalition(agents: impl IntoIterator<Item = AgentId>, inner: Formula) -> Self {
        Formula::Coalition(agents.into_iter().collect(), Box::new(inner))
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Prop(_) | Formula::Zeta(_) => 1,
            Formula::Not(x) | Formula::Coalition(_, x) => 1 + x.depth(),
            Formula::And(x, y) | Formula::Implies(x, y) => 1 + x.depth().max(y.depth()),
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match self {
            Formula::Prop(p) => f.write_str(p),
            Formula::Zeta(a) => write!(f, "zeta({a})"),
            Formula::Not(x) => {
                f.write_str("!")?;
                x.write_prec(f, 3)
            }
            Formula::Coalition(agents, x) => {
                f.write_str("<<")?;
                for (i, a) in agents.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(">> ")?;
                x.write_prec(f, 3)
            }
            Formula::And(x, y) => {
                let paren = ctx > 2;
                if paren {
                    f.write_str("(")?;
                }
                x.write_prec(f, 2)?;
                f.write_str(" & ")?;
                y.write_prec(f, 3)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Implies(x, y) => {
                let paren = ctx > 0;
                if paren {
                    f.write_str("(")?;
                }
                x.write_prec(f, 1)?;
                f.write_str(" -> ")?;
                y.write_prec(f, 0)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Canonical ASCII form with the fewest parentheses the grammar allows.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}
