//! Abstract argumentation, control argumentation frameworks and a one-step
//! coalition logic whose atoms ask whether an argument's status can be
//! controlled.
//!
//! - [`af`]: Dung frameworks and the admissible, complete, grounded,
//!   preferred and stable semantics.
//! - [`caf`]: control frameworks, their completions and controllability.
//! - [`catl`]: multi-agent transition systems over control frameworks, the
//!   coalition logic and a simulator.
//! - [`formats`]: parsers and canonical serializers for all text formats.
//! - [`cli`]: the `cafcoal` command line.

// Diagnostics carry their location and are only built on the error path.
#![allow(clippy::result_large_err)]

pub mod af;
pub mod caf;
pub mod catl;
pub mod cli;
pub mod formats;
