//! Library half of the `cgsynth` binary: configuration, input resolution and
//! the subcommands, kept callable so the wiring can be tested without a
//! process boundary.

pub mod commands;
pub mod config;
pub mod output;
pub mod pipeline;

use std::fmt;

use cgsynth::autogen::AutogenError;
use cgsynth::generator::GenerateError;
use cgsynth::io::{FormatError, IoError};

/// Exit code for documents or graphs that break a rule of the model.
pub const EXIT_VALIDATION: u8 = 1;
/// Exit code for unreadable, malformed or contradictory inputs.
pub const EXIT_CONFIG: u8 = 2;

/// An error paired with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: EXIT_CONFIG, error: error.into() }
    }

    pub fn validation(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: EXIT_VALIDATION, error: error.into() }
    }

    pub fn context(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Self {
        Failure { code: self.code, error: self.error.context(ctx) }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Library errors often repeat their source in their own message;
        // print each link of the chain only when it adds something.
        let mut shown = String::new();
        for cause in self.error.chain() {
            let msg = cause.to_string();
            if shown.ends_with(&msg) {
                continue;
            }
            if !shown.is_empty() {
                shown.push_str(": ");
            }
            shown.push_str(&msg);
        }
        f.write_str(&shown)
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        if e.is_validation() {
            Failure::validation(e)
        } else {
            Failure::config(e)
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        if e.is_validation() {
            Failure::validation(e)
        } else {
            Failure::config(e)
        }
    }
}

impl From<AutogenError> for Failure {
    fn from(e: AutogenError) -> Self {
        match e {
            AutogenError::Config(_) | AutogenError::NoRelationTypes => Failure::config(e),
            _ => Failure::validation(e),
        }
    }
}

impl From<GenerateError> for Failure {
    fn from(e: GenerateError) -> Self {
        match e {
            GenerateError::Config(_) | GenerateError::NoGammas | GenerateError::Pool(_) => Failure::config(e),
            _ => Failure::validation(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(e)
    }
}
