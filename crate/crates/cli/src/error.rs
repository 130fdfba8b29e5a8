use std::path::Path;

use ifthen_core::seq2seq::Seq2SeqError;

/// A failed run, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// A data error prefixed with the offending file.
    pub fn data(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }

    /// Model errors: non-finite values are numeric failures, bad settings are
    /// usage errors, everything else is blamed on the input file.
    pub fn model(path: &Path, err: Seq2SeqError) -> Self {
        match err {
            Seq2SeqError::NonFinite { .. } => CliError::Numeric(err.to_string()),
            Seq2SeqError::BadConfig(_) => CliError::Usage(err.to_string()),
            other => CliError::data(path, other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Unwraps a setting that may come from the command line or the config file.
pub fn required<T: Clone>(value: &Option<T>, flag: &str) -> CliResult<T> {
    value.clone().ok_or_else(|| CliError::usage(format!("missing required setting --{flag}")))
}
