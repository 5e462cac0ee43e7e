//! Command-line front end for the citelaw library.
//!
//! Subcommands map one-to-one onto analyses: `indicators` emits the
//! per-group indicator table, `doublerank` and `distfit` analyse a
//! single group, `compare` puts two groups side by side with an overlay
//! histogram and a verdict, `simulate` writes synthetic corpora and
//! `report` bundles everything into one table. Every command is
//! deterministic given (input, config, seed), so emitted files are
//! byte-stable across runs.

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

use thiserror::Error;

/// Errors carry their process exit code: 1 validation, 2 i/o,
/// 3 insufficient data.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Insufficient(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Insufficient(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<citelaw::CorpusError> for CliError {
    fn from(e: citelaw::CorpusError) -> Self {
        match e {
            citelaw::CorpusError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<citelaw::ranking::RankingError> for CliError {
    fn from(e: citelaw::ranking::RankingError) -> Self {
        match e {
            citelaw::ranking::RankingError::EmptyCorpus => CliError::Insufficient(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<citelaw::distfit::DistFitError> for CliError {
    fn from(e: citelaw::distfit::DistFitError) -> Self {
        use citelaw::distfit::DistFitError::*;
        match e {
            EmptySample | TooFewSamples { .. } | DegenerateSample => {
                CliError::Insufficient(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<citelaw::rankfit::RankFitError> for CliError {
    fn from(e: citelaw::rankfit::RankFitError) -> Self {
        match e {
            citelaw::rankfit::RankFitError::TooFewPoints { .. } => {
                CliError::Insufficient(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<citelaw::indicators::IndicatorError> for CliError {
    fn from(e: citelaw::indicators::IndicatorError) -> Self {
        use citelaw::indicators::IndicatorError::*;
        match e {
            EmptyInput | TooShort { .. } | ConstantSequence => {
                CliError::Insufficient(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<citelaw::synth::SynthError> for CliError {
    fn from(e: citelaw::synth::SynthError) -> Self {
        CliError::Validation(e.to_string())
    }
}
