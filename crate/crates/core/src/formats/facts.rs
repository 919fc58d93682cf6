//! Shared reader for `name(arg, ...).` fact files.

use super::{DiagnosticKind, ParseDiagnostic, SourceLocation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Term {
    /// `[A-Za-z0-9_]+`
    Word(String),
    /// `"..."` without escapes.
    Str(String),
    /// `(w1, w2, ...)` of words.
    Tuple(Vec<String>),
}

#[derive(Debug, Clone)]
pub(crate) struct Arg {
    pub term: Term,
    pub loc: SourceLocation,
}

#[derive(Debug, Clone)]
pub(crate) struct Fact {
    pub name: String,
    pub loc: SourceLocation,
    pub args: Vec<Arg>,
}

pub(crate) fn syntax(msg: impl Into<String>, loc: SourceLocation) -> ParseDiagnostic {
    ParseDiagnostic::error(DiagnosticKind::Syntax(msg.into()), loc)
}

impl Fact {
    pub fn expect_arity(&self, n: usize) -> Result<(), ParseDiagnostic> {
        if self.args.len() == n {
            Ok(())
        } else {
            Err(syntax(
                format!("`{}` takes {n} argument(s), found {}", self.name, self.args.len()),
                self.loc.clone(),
            ))
        }
    }

    pub fn word(&self, i: usize) -> Result<&str, ParseDiagnostic> {
        match &self.args[i].term {
            Term::Word(w) => Ok(w),
            _ => Err(syntax("expected a name", self.args[i].loc.clone())),
        }
    }

    pub fn number(&self, i: usize) -> Result<u64, ParseDiagnostic> {
        let w = self.word(i)?;
        parse_number(w).ok_or_else(|| syntax(format!("expected a number, found `{w}`"), self.args[i].loc.clone()))
    }

    pub fn string(&self, i: usize) -> Result<&str, ParseDiagnostic> {
        match &self.args[i].term {
            Term::Str(s) => Ok(s),
            _ => Err(syntax("expected a quoted string", self.args[i].loc.clone())),
        }
    }

    pub fn numbers(&self, i: usize) -> Result<Vec<u64>, ParseDiagnostic> {
        match &self.args[i].term {
            Term::Tuple(items) => items
                .iter()
                .map(|w| {
                    parse_number(w)
                        .ok_or_else(|| syntax(format!("expected a number, found `{w}`"), self.args[i].loc.clone()))
                })
                .collect(),
            _ => Err(syntax("expected a tuple `(m1,...,mn)`", self.args[i].loc.clone())),
        }
    }
}

pub(crate) fn parse_number(w: &str) -> Option<u64> {
    if w.bytes().all(|b| b.is_ascii_digit()) {
        w.parse().ok()
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Open,
    Close,
    Comma,
    Dot,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn loc(&self) -> SourceLocation {
        SourceLocation::new(self.line, self.col)
    }

    fn bump(&mut self) -> u8 {
        let b = self.bytes[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn next(&mut self) -> Result<Option<(Tok, SourceLocation)>, ParseDiagnostic> {
        loop {
            let Some(&b) = self.bytes.get(self.pos) else {
                return Ok(None);
            };
            if b == b'%' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.bump();
                }
            } else if b.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let loc = self.loc();
        let b = self.bytes[self.pos];
        let tok = match b {
            b'(' => {
                self.bump();
                Tok::Open
            }
            b')' => {
                self.bump();
                Tok::Close
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'.' => {
                self.bump();
                Tok::Dot
            }
            b'"' => {
                self.bump();
                let start = self.pos;
                loop {
                    match self.bytes.get(self.pos) {
                        None | Some(b'\n') => return Err(syntax("unterminated string", loc)),
                        Some(b'"') => break,
                        Some(&c) if !c.is_ascii() => return Err(syntax("non-ASCII character", self.loc())),
                        Some(_) => {
                            self.bump();
                        }
                    }
                }
                let s = String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned();
                self.bump();
                Tok::Str(s)
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let start = self.pos;
                while self
                    .bytes
                    .get(self.pos)
                    .is_some_and(|&c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.bump();
                }
                Tok::Word(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
            }
            c if !c.is_ascii() => return Err(syntax("non-ASCII character", loc)),
            c => return Err(syntax(format!("unexpected character `{}`", c as char), loc)),
        };
        Ok(Some((tok, loc)))
    }
}

struct Reader<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(Tok, SourceLocation)>>,
}

impl Reader<'_> {
    fn peek(&mut self) -> Result<Option<&(Tok, SourceLocation)>, ParseDiagnostic> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap().as_ref())
    }

    fn take(&mut self) -> Result<Option<(Tok, SourceLocation)>, ParseDiagnostic> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<SourceLocation, ParseDiagnostic> {
        match self.take()? {
            Some((t, loc)) if t == want => Ok(loc),
            Some((t, loc)) => Err(syntax(format!("expected {what}, found {}", describe(&t)), loc)),
            None => Err(syntax(format!("expected {what}, found end of input"), self.lexer.loc())),
        }
    }

    fn term(&mut self) -> Result<Arg, ParseDiagnostic> {
        match self.take()? {
            Some((Tok::Word(w), loc)) => Ok(Arg {
                term: Term::Word(w),
                loc,
            }),
            Some((Tok::Str(s), loc)) => Ok(Arg {
                term: Term::Str(s),
                loc,
            }),
            Some((Tok::Open, loc)) => {
                let mut items = Vec::new();
                loop {
                    match self.take()? {
                        Some((Tok::Word(w), _)) => items.push(w),
                        Some((t, l)) => return Err(syntax(format!("expected a name, found {}", describe(&t)), l)),
                        None => return Err(syntax("unterminated tuple", loc)),
                    }
                    match self.take()? {
                        Some((Tok::Comma, _)) => {}
                        Some((Tok::Close, _)) => break,
                        Some((t, l)) => return Err(syntax(format!("expected `,` or `)`, found {}", describe(&t)), l)),
                        None => return Err(syntax("unterminated tuple", loc)),
                    }
                }
                Ok(Arg {
                    term: Term::Tuple(items),
                    loc,
                })
            }
            Some((t, loc)) => Err(syntax(format!("expected a term, found {}", describe(&t)), loc)),
            None => Err(syntax("expected a term, found end of input", self.lexer.loc())),
        }
    }

    fn fact(&mut self) -> Result<Option<Fact>, ParseDiagnostic> {
        let (name, loc) = match self.take()? {
            None => return Ok(None),
            Some((Tok::Word(w), loc)) => (w, loc),
            Some((t, loc)) => return Err(syntax(format!("expected a fact, found {}", describe(&t)), loc)),
        };
        self.expect(Tok::Open, "`(`")?;
        let mut args = vec![self.term()?];
        loop {
            match self.take()? {
                Some((Tok::Comma, _)) => args.push(self.term()?),
                Some((Tok::Close, _)) => break,
                Some((t, l)) => return Err(syntax(format!("expected `,` or `)`, found {}", describe(&t)), l)),
                None => return Err(syntax("unterminated fact", loc)),
            }
        }
        match self.peek()? {
            Some((Tok::Dot, _)) => {
                self.take()?;
            }
            Some((t, l)) => return Err(syntax(format!("expected `.`, found {}", describe(t)), l.clone())),
            None => return Err(syntax("expected `.`, found end of input", self.lexer.loc())),
        }
        Ok(Some(Fact { name, loc, args }))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
    }
}

/// Reads every fact in `text`. An input without facts yields `EmptyInput`.
pub(crate) fn read_facts(text: &str) -> Result<Vec<Fact>, ParseDiagnostic> {
    let mut reader = Reader {
        lexer: Lexer {
            bytes: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        },
        peeked: None,
    };
    let mut facts = Vec::new();
    while let Some(f) = reader.fact()? {
        facts.push(f);
    }
    if facts.is_empty() {
        return Err(ParseDiagnostic::error(
            DiagnosticKind::EmptyInput,
            SourceLocation::new(1, 1),
        ));
    }
    Ok(facts)
}
