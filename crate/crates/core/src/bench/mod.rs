//! Experiment harness: key generation, seeded trials, tail statistics,
//! closed-form tail bounds and the `whp-bench` command line.

pub mod bounds;
pub mod cli;
pub mod config;
pub mod experiment;
pub mod report;

use thiserror::Error;

pub use bounds::{bound_eval, Bound, HypothesisViolated};
pub use config::{Algorithm, ExperimentConfig, KeyDist, OutputFormat};
pub use experiment::{gen_keys, run_experiment, TrialRecord};
pub use report::{tail_report, Summary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl BenchError {
    /// 1 verifier or assertion failure, 2 config error, 3 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Verification(_) => 1,
            Self::Config(_) => 2,
            Self::Io(_) => 3,
        }
    }
}
