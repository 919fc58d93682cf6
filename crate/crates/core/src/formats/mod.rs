//! Text formats: APX and TGF frameworks, control frameworks (`.caf`),
//! systems (`.catl`) and formulas.
//!
//! Every format except TGF is a sequence of `.`-terminated facts such as
//! `att(a,b).`, with `%` line comments; whitespace between tokens is
//! insignificant. Input must be ASCII. Parsers are the validation gate: a value
//! that comes out of one satisfies every invariant of its type. Serializers
//! emit a canonical, sorted form that parses back to an equal value.

use std::fmt;

use thiserror::Error;

use crate::af::AfError;
use crate::caf::CafError;
use crate::catl::CatlError;

mod apx;
mod caf;
mod catl;
mod facts;
mod formula;
mod tgf;

pub use apx::{parse_apx, serialize_apx};
pub use caf::{parse_caf, serialize_caf};
pub use catl::{parse_catl, parse_catl_with, serialize_catl};
pub use formula::{parse_formula, parse_queries, serialize_formula};
pub use tgf::{parse_tgf, serialize_tgf};

/// `[A-Za-z_][A-Za-z0-9_]*`: the shape of state and proposition names.
pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic() || b == b'_')
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceLocation {
    pub file: String,
    /// 1-based.
    pub line: usize,
    /// 1-based, in bytes (input is ASCII).
    pub column: usize,
}

impl SourceLocation {
    pub const DEFAULT_FILE: &'static str = "<input>";

    pub fn new(line: usize, column: usize) -> Self {
        Self {
            file: Self::DEFAULT_FILE.to_string(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticKind {
    #[error("empty input")]
    EmptyInput,
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing `#` separator line")]
    MissingSeparator,
    #[error("undeclared argument `{0}`")]
    UndeclaredArgument(String),
    #[error("unknown fact `{0}`")]
    UnknownFact(String),
    #[error("symmetric attack ({0},{1}) declared more than once")]
    DuplicateSymmetricAttack(String, String),
    #[error("no model update for caf {caf} under {action}; the framework stays unchanged")]
    MissingModelUpdate { caf: usize, action: String },
    #[error("cannot load `{path}`: {reason}")]
    CafLoad { path: String, reason: String },
    #[error(transparent)]
    Framework(#[from] AfError),
    #[error(transparent)]
    Caf(#[from] CafError),
    #[error(transparent)]
    System(#[from] CatlError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub location: SourceLocation,
}

impl ParseDiagnostic {
    pub fn error(kind: impl Into<DiagnosticKind>, location: SourceLocation) -> Self {
        Self {
            severity: Severity::Error,
            kind: kind.into(),
            location,
        }
    }

    pub fn warning(kind: impl Into<DiagnosticKind>, location: SourceLocation) -> Self {
        Self {
            severity: Severity::Warning,
            kind: kind.into(),
            location,
        }
    }

    /// Attributes the diagnostic to `file`.
    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.location.file = file.into();
        self
    }

    pub fn message(&self) -> String {
        self.kind.to_string()
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.location, self.severity, self.kind)
    }
}

impl std::error::Error for ParseDiagnostic {}

/// A successfully parsed value together with the warnings raised on the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ParseDiagnostic>,
}

impl<T> Parsed<T> {
    pub fn in_file(mut self, file: &str) -> Self {
        for w in &mut self.warnings {
            w.location.file = file.to_string();
        }
        self
    }
}
