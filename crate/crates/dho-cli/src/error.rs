//! Error categories with distinct exit codes and machine-parsable prefixes.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Invalid or missing configuration (flags or config file).
    Schema(String),
    /// A domain error reported by the computation modules.
    Domain(String),
    /// Filesystem failure while reading config or writing output.
    Io(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    pub fn domain(err: impl fmt::Display) -> Self {
        CliError::Domain(err.to_string())
    }

    pub fn io(context: &str, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) | CliError::Domain(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}
