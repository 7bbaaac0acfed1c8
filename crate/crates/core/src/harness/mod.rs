//! Scenario files, the two-sided theorem computation, the lemma suites and
//! report output.

mod config;
mod lemmas;
mod report;
mod theorem;

use thiserror::Error;

pub use config::{Format, LemmaParams, OutputSpec, Scenario, ScenarioConfig};
pub use lemmas::{run_lemma_suite, LemmaReport, Suite};
pub use report::{emit, emit_ladder, write_report, Report, CSV_HEADER};
pub use theorem::{epsilon_zero, ladder_steps, run_ladder, run_theorem_check, with_workers, LadderSummary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    /// Malformed scenario or violated hypothesis; nothing was computed.
    #[error("config error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 2,
            HarnessError::Compute(_) => 1,
        }
    }
}

impl From<crate::sieve::SieveError> for HarnessError {
    fn from(e: crate::sieve::SieveError) -> Self {
        use crate::sieve::SieveError;
        match e {
            SieveError::Plan(_) | SieveError::BadPrimeAboveW(_) | SieveError::Hypothesis(_) => {
                HarnessError::Config(e.to_string())
            }
            other => HarnessError::Compute(other.to_string()),
        }
    }
}

impl From<crate::arith::ArithError> for HarnessError {
    fn from(e: crate::arith::ArithError) -> Self {
        use crate::arith::ArithError;
        match e {
            ArithError::WTooSmall { .. } | ArithError::BadPrimeAboveW(_) | ArithError::UnknownPreset(_) => {
                HarnessError::Config(e.to_string())
            }
            other => HarnessError::Compute(other.to_string()),
        }
    }
}

impl From<crate::numfield::FieldError> for HarnessError {
    fn from(e: crate::numfield::FieldError) -> Self {
        HarnessError::Compute(e.to_string())
    }
}
