//! The `cafcoal` command line.
//!
//! Verdicts and results go to the output stream; diagnostics go to the error
//! stream only. Exit codes: 0 success or positive verdict, 1 negative verdict,
//! 2 usage, parse or validation error, 3 budget exceeded.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::af::{AcceptanceMode, AfError, ArgumentId, ArgumentationFramework, Semantics};
use crate::caf::{CafError, Configuration, Limits, QueryMode, TargetQuery};
use crate::catl::{CafAtsSystem, CatlError, Formula, JointAction, ModelChecker, ZetaPolicy};
use crate::formats::{self, ParseDiagnostic, Severity};

const AFTER_HELP: &str = "\
Exit status: 0 on success or a positive verdict, 1 on a negative verdict
(NO, `configuration: none`, a false formula), 2 on usage, parse or
validation errors, 3 when a completion or configuration budget is exceeded.
Set CAFCOAL_COLOR=never to disable colored diagnostics.";

#[derive(Debug, Parser)]
#[command(name = "cafcoal", version, about = "Argumentation semantics, control frameworks and coalition model checking", after_help = AFTER_HELP)]
pub struct Cli {
    /// Maximum number of completions a control query may visit.
    #[arg(long, global = true, value_name = "N")]
    pub budget_completions: Option<u64>,
    /// Maximum number of configurations a control query may visit.
    #[arg(long, global = true, value_name = "N")]
    pub budget_configurations: Option<u64>,
    /// Print additional detail (the completions themselves for `completions`).
    #[arg(long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Enumerate extensions.
    #[value(name = "EE")]
    Enumerate,
    /// Credulous acceptance of `--arg`.
    #[value(name = "CA")]
    Credulous,
    /// Skeptical acceptance of `--arg` (true when there are no extensions).
    #[value(name = "SA")]
    Skeptical,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a framework given as `.apx` or `.tgf`.
    Solve {
        file: PathBuf,
        #[arg(long)]
        semantics: Semantics,
        #[arg(long, value_enum)]
        task: Task,
        /// Argument queried by CA and SA.
        #[arg(long, value_name = "ARG")]
        arg: Option<ArgumentId>,
        /// Stop EE after this many extensions and print a `%` truncation line.
        #[arg(long, default_value_t = 10_000, value_name = "N")]
        max_extensions: usize,
    },
    /// Count the completions of a `.caf` file.
    Completions { file: PathBuf },
    /// Find the first configuration controlling a target argument.
    Control {
        file: PathBuf,
        #[arg(long, value_name = "ARG")]
        target: ArgumentId,
        #[arg(long)]
        semantics: Semantics,
        /// credulous-accept, skeptical-accept, credulous-reject or skeptical-reject.
        #[arg(long)]
        mode: QueryMode,
    },
    /// Check formulas against a `.catl` system.
    Check {
        file: PathBuf,
        #[command(flatten)]
        input: FormulaInput,
        /// State to evaluate at; defaults to the initial state.
        #[arg(long)]
        state: Option<String>,
        #[command(flatten)]
        policy: PolicyArg,
        /// Also print the first witnessing move of a top-level coalition.
        #[arg(long)]
        witness: bool,
    },
    /// Run a joint-action script through a `.catl` system.
    Simulate {
        file: PathBuf,
        /// Joint actions such as `1,2;2,1`; empty for no steps.
        #[arg(long, default_value = "", value_parser = parse_actions)]
        actions: Actions,
        /// Start state; defaults to the initial state.
        #[arg(long)]
        state: Option<String>,
        #[command(flatten)]
        policy: PolicyArg,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct FormulaInput {
    #[arg(long)]
    pub formula: Option<String>,
    /// File with one formula per line.
    #[arg(long, value_name = "FILE")]
    pub queries: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolicyArg {
    /// How `zeta(a)` is decided, as `semantics:mode`.
    #[arg(long, default_value = "stable:skeptical-accept", value_name = "SEM:MODE")]
    pub zeta_policy: ZetaPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actions(pub Vec<JointAction>);

/// `1,2;2,1` → two joint actions. Blank input means no actions.
pub fn parse_actions(s: &str) -> Result<Actions, String> {
    if s.trim().is_empty() {
        return Ok(Actions(Vec::new()));
    }
    s.split(';')
        .enumerate()
        .map(|(i, step)| {
            step.split(',')
                .map(|m| {
                    let m = m.trim();
                    m.parse::<u32>()
                        .ok()
                        .filter(|_| m.bytes().all(|b| b.is_ascii_digit()))
                        .ok_or_else(|| format!("step {}: `{m}` is not a move number", i + 1))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(JointAction::new)
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Actions)
}

/// A failure with the exit code it maps to.
enum Failure {
    Usage(String),
    Parse(ParseDiagnostic),
    Budget(String),
}

impl From<ParseDiagnostic> for Failure {
    fn from(d: ParseDiagnostic) -> Self {
        Failure::Parse(d)
    }
}

fn is_budget(e: &CafError) -> bool {
    matches!(
        e,
        CafError::CompletionBudgetExceeded { .. } | CafError::ConfigurationBudgetExceeded { .. }
    )
}

impl From<CafError> for Failure {
    fn from(e: CafError) -> Self {
        if is_budget(&e) {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<CatlError> for Failure {
    fn from(e: CatlError) -> Self {
        match e {
            CatlError::Caf(c) => c.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<AfError> for Failure {
    fn from(e: AfError) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Diagnostics<'a> {
    err: &'a mut dyn Write,
    color: bool,
}

impl Diagnostics<'_> {
    fn label(&self, severity: Severity) -> String {
        match (self.color, severity) {
            (false, s) => s.to_string(),
            (true, Severity::Error) => "\x1b[1;31merror\x1b[0m".into(),
            (true, Severity::Warning) => "\x1b[1;33mwarning\x1b[0m".into(),
        }
    }

    fn plain(&mut self, severity: Severity, msg: impl fmt::Display) {
        let label = self.label(severity);
        let _ = writeln!(self.err, "{label}: {msg}");
    }

    fn located(&mut self, d: &ParseDiagnostic) {
        let label = self.label(d.severity);
        let _ = writeln!(self.err, "{}: {label}: {}", d.location, d.kind);
    }
}

struct Session<'a> {
    out: &'a mut dyn Write,
    diag: Diagnostics<'a>,
    limits: Limits,
    verbose: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read `{}`: {e}", path.display())))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

impl Session<'_> {
    fn warn(&mut self, warnings: &[ParseDiagnostic]) {
        for w in warnings {
            self.diag.located(w);
        }
    }

    fn load_af(&mut self, path: &Path) -> Result<ArgumentationFramework, Failure> {
        let parse = match path.extension().and_then(|e| e.to_str()) {
            Some("apx") => formats::parse_apx,
            Some("tgf") => formats::parse_tgf,
            _ => {
                return Err(Failure::Usage(format!(
                    "`{}`: expected a .apx or .tgf file",
                    path.display()
                )))
            }
        };
        let text = read(path)?;
        Ok(parse(&text).map_err(|d| d.in_file(display(path)))?)
    }

    fn load_caf(&mut self, path: &Path) -> Result<crate::caf::ControlFramework, Failure> {
        let text = read(path)?;
        let parsed = formats::parse_caf(&text).map_err(|d| d.in_file(display(path)))?;
        let parsed = parsed.in_file(&display(path));
        self.warn(&parsed.warnings);
        Ok(parsed.value)
    }

    fn load_system(&mut self, path: &Path, policy: ZetaPolicy) -> Result<CafAtsSystem, Failure> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let parsed = formats::parse_catl(&text, base).map_err(|d| d.in_file(display(path)))?;
        let name = display(path);
        let warnings: Vec<ParseDiagnostic> = parsed
            .warnings
            .into_iter()
            .map(|w| {
                if w.location.file == formats::SourceLocation::DEFAULT_FILE {
                    w.in_file(name.clone())
                } else {
                    w
                }
            })
            .collect();
        self.warn(&warnings);
        Ok(parsed.value.with_zeta_policy(policy))
    }

    fn line(&mut self, text: impl fmt::Display) {
        let _ = writeln!(self.out, "{text}");
    }

    fn solve(
        &mut self,
        file: &Path,
        semantics: Semantics,
        task: Task,
        arg: Option<&ArgumentId>,
        cap: usize,
    ) -> Result<u8, Failure> {
        let mode = match task {
            Task::Enumerate => None,
            Task::Credulous => Some(AcceptanceMode::Credulous),
            Task::Skeptical => Some(AcceptanceMode::Skeptical),
        };
        if mode.is_some() && arg.is_none() {
            return Err(Failure::Usage("tasks CA and SA need --arg".into()));
        }
        let af = self.load_af(file)?;
        match mode {
            None => {
                let found = af.enumerate_extensions_capped(semantics, cap);
                for e in &found.extensions {
                    self.line(e.display(&af));
                }
                if found.truncated {
                    self.line(format!("% truncated after {cap} extensions"));
                }
                Ok(0)
            }
            Some(mode) => {
                let yes = af.is_accepted(arg.unwrap().as_str(), semantics, mode)?;
                self.line(if yes { "YES" } else { "NO" });
                Ok(if yes { 0 } else { 1 })
            }
        }
    }

    fn completions(&mut self, file: &Path) -> Result<u8, Failure> {
        let caf = self.load_caf(file)?;
        let count = caf.completion_count(&self.limits)?;
        self.line(format!("completions: {count}"));
        if self.verbose {
            for (i, c) in caf.completions().enumerate() {
                let af = caf.induced_framework(&c, &Configuration::default())?;
                self.line(format!("% completion {}", i + 1));
                let _ = write!(self.out, "{}", formats::serialize_apx(&af));
            }
        }
        Ok(0)
    }

    fn control(&mut self, file: &Path, query: TargetQuery) -> Result<u8, Failure> {
        let caf = self.load_caf(file)?;
        match caf.find_controlling_configuration(&query, &self.limits)? {
            Some(config) => {
                self.line(format!("configuration: {config}"));
                Ok(0)
            }
            None => {
                self.line("configuration: none");
                Ok(1)
            }
        }
    }

    fn check(
        &mut self,
        file: &Path,
        input: &FormulaInput,
        state: Option<&str>,
        policy: ZetaPolicy,
        witness: bool,
    ) -> Result<u8, Failure> {
        let formulas: Vec<Formula> = match (&input.formula, &input.queries) {
            (Some(text), _) => vec![formats::parse_formula(text).map_err(|d| d.in_file("<formula>"))?],
            (None, Some(path)) => {
                let text = read(path)?;
                formats::parse_queries(&text)
                    .map_err(|d| d.in_file(display(path)))?
                    .into_iter()
                    .map(|(_, f)| f)
                    .collect()
            }
            (None, None) => return Err(Failure::Usage("give --formula or --queries".into())),
        };
        let sys = self.load_system(file, policy)?;
        let state = match state {
            Some(s) => {
                sys.state_index(s)?;
                s.to_string()
            }
            None => sys.initial_state().to_string(),
        };
        let mut checker = ModelChecker::with_limits(&sys, self.limits);
        let mut all = true;
        for phi in &formulas {
            let verdict = checker.satisfies(&state, phi)?;
            all &= verdict;
            self.line(format!("{state} |= {phi} : {verdict}"));
            if let (true, Formula::Coalition(agents, inner)) = (witness, phi) {
                match checker.witness_coalition_action(&state, agents, inner)? {
                    Some(w) => self.line(format!("witness: {w}")),
                    None => self.line("witness: none"),
                }
            }
        }
        Ok(if all { 0 } else { 1 })
    }

    fn simulate(
        &mut self,
        file: &Path,
        actions: &Actions,
        state: Option<&str>,
        policy: ZetaPolicy,
    ) -> Result<u8, Failure> {
        let sys = self.load_system(file, policy)?;
        let start = state.map_or_else(|| sys.initial_state().to_string(), str::to_string);
        let trace = ModelChecker::with_limits(&sys, self.limits).simulate(&start, &actions.0)?;
        let _ = write!(self.out, "{trace}");
        Ok(0)
    }
}

/// Runs one command line. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = if color {
                e.render().ansi().to_string()
            } else {
                e.render().to_string()
            };
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    let defaults = Limits::default();
    let mut session = Session {
        out,
        diag: Diagnostics { err, color },
        limits: Limits {
            max_completions: cli.budget_completions.unwrap_or(defaults.max_completions),
            max_configurations: cli.budget_configurations.unwrap_or(defaults.max_configurations),
        },
        verbose: cli.verbose,
    };
    let result = match &cli.command {
        Command::Solve {
            file,
            semantics,
            task,
            arg,
            max_extensions,
        } => session.solve(file, *semantics, *task, arg.as_ref(), *max_extensions),
        Command::Completions { file } => session.completions(file),
        Command::Control {
            file,
            target,
            semantics,
            mode,
        } => session.control(file, TargetQuery::new(target.clone(), *semantics, *mode)),
        Command::Check {
            file,
            input,
            state,
            policy,
            witness,
        } => session.check(file, input, state.as_deref(), policy.zeta_policy, *witness),
        Command::Simulate {
            file,
            actions,
            state,
            policy,
        } => session.simulate(file, actions, state.as_deref(), policy.zeta_policy),
    };
    let _ = session.out.flush();
    match result {
        Ok(code) => code,
        Err(Failure::Parse(d)) => {
            session.diag.located(&d);
            2
        }
        Err(Failure::Usage(msg)) => {
            session.diag.plain(Severity::Error, msg);
            2
        }
        Err(Failure::Budget(msg)) => {
            session.diag.plain(Severity::Error, msg);
            3
        }
    }
}
