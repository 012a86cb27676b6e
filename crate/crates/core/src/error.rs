//! Shared error types used across modules.

use thiserror::Error;

#[derive(Debug, Error)]
#[error("unknown joint name `{name}`")]
pub struct JointParseError {
    pub name: String,
}

#[derive(Debug, Error)]
pub enum LimitsError {
    #[error("cannot read limits file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid limits table: {0}")]
    Format(String),
}

/// Validation failure for a frame field, naming the offending channel.
#[derive(Debug, Error)]
#[error("{channel}: {reason} (value {value})")]
pub struct FrameValidationError {
    pub channel: String,
    pub reason: &'static str,
    pub value: f64,
}
