//! Formula syntax.
//!
//! ```text
//! formula := disj ( "->" formula )?        right-associative, loosest
//! disj    := conj ( "|" conj )*            sugar for !(!a & !b)
//! conj    := unary ( "&" unary )*          left-associative
//! unary   := "!" unary | "<<" agents? ">>" unary | atom
//! agents  := N ( "," N )*                  N >= 1
//! atom    := "zeta" "(" name ")" | ident | "(" formula ")"
//! ```

use std::collections::BTreeSet;

use super::facts::syntax;
use super::{is_identifier, DiagnosticKind, ParseDiagnostic, SourceLocation};
use crate::af::ArgumentId;
use crate::catl::{AgentId, Formula};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Not,
    And,
    Or,
    Arrow,
    Open,
    Close,
    LAngle,
    RAngle,
    Comma,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::LAngle => "`<<`".into(),
        Tok::RAngle => "`>>`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str, line: usize) -> Result<Vec<(Tok, SourceLocation)>, ParseDiagnostic> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let loc = SourceLocation::new(line, i + 1);
        let b = bytes[i];
        let two = bytes.get(i..i + 2);
        let (tok, len) = match b {
            b if b.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            b'!' => (Tok::Not, 1),
            b'&' => (Tok::And, 1),
            b'|' => (Tok::Or, 1),
            b'(' => (Tok::Open, 1),
            b')' => (Tok::Close, 1),
            b',' => (Tok::Comma, 1),
            _ if two == Some(b"->") => (Tok::Arrow, 2),
            _ if two == Some(b"<<") => (Tok::LAngle, 2),
            _ if two == Some(b">>") => (Tok::RAngle, 2),
            b if b.is_ascii_alphanumeric() || b == b'_' => {
                let len = bytes[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == b'_')
                    .count();
                (Tok::Word(text[i..i + len].to_string()), len)
            }
            b if !b.is_ascii() => return Err(syntax("non-ASCII character", loc)),
            b => return Err(syntax(format!("unexpected character `{}`", b as char), loc)),
        };
        out.push((tok, loc));
        i += len;
    }
    out.push((Tok::End, SourceLocation::new(line, bytes.len() + 1)));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceLocation)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> SourceLocation {
        self.toks[self.pos].1.clone()
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseDiagnostic {
        syntax(
            format!("expected {wanted}, found {}", describe(self.peek())),
            self.loc(),
        )
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseDiagnostic> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&describe(&t)))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseDiagnostic> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseDiagnostic> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseDiagnostic> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseDiagnostic> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LAngle => {
                self.bump();
                let agents = self.agents()?;
                Ok(Formula::Coalition(agents, Box::new(self.unary()?)))
            }
            _ => self.atom(),
        }
    }

    fn agents(&mut self) -> Result<BTreeSet<AgentId>, ParseDiagnostic> {
        let mut out = BTreeSet::new();
        if *self.peek() == Tok::RAngle {
            self.bump();
            return Ok(out);
        }
        loop {
            let loc = self.loc();
            match self.bump() {
                Tok::Word(w) => {
                    let id = w
                        .parse::<u32>()
                        .ok()
                        .filter(|_| w.bytes().all(|b| b.is_ascii_digit()))
                        .and_then(AgentId::new)
                        .ok_or_else(|| syntax(format!("`{w}` is not an agent number"), loc))?;
                    out.insert(id);
                }
                t => return Err(syntax(format!("expected an agent number, found {}", describe(&t)), loc)),
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RAngle => {
                    self.bump();
                    return Ok(out);
                }
                _ => return Err(self.unexpected("`,` or `>>`")),
            }
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseDiagnostic> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Open => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::Close)?;
                Ok(inner)
            }
            Tok::Word(w) if w == "zeta" && self.toks[self.pos + 1].0 == Tok::Open => {
                self.bump();
                self.bump();
                let arg_loc = self.loc();
                let arg = match self.bump() {
                    Tok::Word(a) => ArgumentId::new(a).map_err(|e| ParseDiagnostic::error(e, arg_loc))?,
                    t => {
                        return Err(syntax(
                            format!("expected an argument name, found {}", describe(&t)),
                            arg_loc,
                        ))
                    }
                };
                self.expect(Tok::Close)?;
                Ok(Formula::zeta(arg))
            }
            Tok::Word(w) => {
                if !is_identifier(&w) {
                    return Err(syntax(format!("`{w}` is not a proposition name"), loc));
                }
                self.bump();
                Ok(Formula::prop(w))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

fn parse_line(text: &str, line: usize) -> Result<Formula, ParseDiagnostic> {
    let toks = lex(text, line)?;
    if toks.len() == 1 {
        return Err(ParseDiagnostic::error(
            DiagnosticKind::EmptyInput,
            SourceLocation::new(line, 1),
        ));
    }
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of formula"));
    }
    Ok(f)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseDiagnostic> {
    // the grammar is single-line; report positions on the right line anyway
    let mut f = None;
    for (n, line) in text.split('\n').enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if f.is_some() {
            return Err(syntax("a formula must fit on one line", SourceLocation::new(n + 1, 1)));
        }
        f = Some(parse_line(line, n + 1)?);
    }
    f.ok_or_else(|| ParseDiagnostic::error(DiagnosticKind::EmptyInput, SourceLocation::new(1, 1)))
}

/// One formula per line; blank lines and lines starting with `%` are skipped.
/// Returns each formula with its 1-based line number.
pub fn parse_queries(text: &str) -> Result<Vec<(usize, Formula)>, ParseDiagnostic> {
    let mut out = Vec::new();
    for (n, line) in text.split('\n').enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        out.push((n + 1, parse_line(line, n + 1)?));
    }
    if out.is_empty() {
        return Err(ParseDiagnostic::error(
            DiagnosticKind::EmptyInput,
            SourceLocation::new(1, 1),
        ));
    }
    Ok(out)
}

pub fn serialize_formula(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agents(ids: &[u32]) -> BTreeSet<AgentId> {
        ids.iter().map(|&i| AgentId::new(i).unwrap()).collect()
    }

    fn p(s: &str) -> Formula {
        Formula::prop(s)
    }

    #[test]
    fn examples() {
        let f = parse_formula("<<1,2>> (zeta(t) & !p)").unwrap();
        assert_eq!(
            f,
            Formula::Coalition(
                agents(&[1, 2]),
                Box::new(Formula::and(
                    Formula::zeta(ArgumentId::new("t").unwrap()),
                    Formula::not(p("p"))
                ))
            )
        );
        assert_eq!(
            parse_formula("p -> q -> r").unwrap(),
            Formula::implies(p("p"), Formula::implies(p("q"), p("r")))
        );
        assert_eq!(parse_formula("<<>> p").unwrap(), Formula::coalition([], p("p")));
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse_formula("a & b & c").unwrap(),
            Formula::and(Formula::and(p("a"), p("b")), p("c"))
        );
        assert_eq!(
            parse_formula("!a & <<1>> b | c -> d").unwrap(),
            Formula::implies(
                Formula::or(
                    Formula::and(Formula::not(p("a")), Formula::coalition(agents(&[1]), p("b"))),
                    p("c")
                ),
                p("d")
            )
        );
        assert_eq!(
            parse_formula("<<1>> a & b").unwrap(),
            Formula::and(Formula::coalition(agents(&[1]), p("a")), p("b"))
        );
        assert_eq!(
            parse_formula("zeta(7)").unwrap(),
            Formula::zeta(ArgumentId::new("7").unwrap())
        );
        assert_eq!(
            parse_formula("<<2,1,2>> p").unwrap(),
            Formula::coalition(agents(&[1, 2]), p("p"))
        );
    }

    #[test]
    fn minimal_parentheses() {
        for (src, printed) in [
            ("<<1,2>> (zeta(t) & !p)", "<<1,2>> (zeta(t) & !p)"),
            ("(a -> b) -> c", "(a -> b) -> c"),
            ("a -> (b -> c)", "a -> b -> c"),
            ("a & (b & c)", "a & (b & c)"),
            ("(a & b) & c", "a & b & c"),
            ("!(a & b)", "!(a & b)"),
            ("((!a))", "!a"),
            ("<<>> <<1>> p", "<<>> <<1>> p"),
            ("a | b", "!(!a & !b)"),
            ("(a -> b) & c", "(a -> b) & c"),
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(f.to_string(), printed, "{src}");
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn errors_are_located() {
        let e = parse_formula("p & ").unwrap_err();
        assert_eq!((e.location.line, e.location.column), (1, 5));
        assert_eq!(parse_formula("   ").unwrap_err().kind, DiagnosticKind::EmptyInput);
        for bad in [
            "<<0>> p", "<<a>> p", "p q", "(p", "zeta()", "1p", "p -", "<<1 p", "p ∧ q",
        ] {
            assert!(parse_formula(bad).is_err(), "{bad}");
        }
        let e = parse_formula("p &\n& q").unwrap_err();
        assert_eq!(e.location.line, 1);
    }

    #[test]
    fn query_files() {
        let qs = parse_queries("% header\n<<1>> p\n\n!p\n").unwrap();
        assert_eq!(qs.iter().map(|(l, _)| *l).collect::<Vec<_>>(), [2, 4]);
        let e = parse_queries("p\n)\n").unwrap_err();
        assert_eq!(e.location.line, 2);
    }
}
