//! CLI error categories with distinct exit codes.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input text (syntax, missing fields, bad version). Exit 2.
    Parse(String),
    /// Well-formed input violating a domain invariant. Exit 3.
    Semantic(String),
    /// Dimension guard exceeded. Exit 4.
    Guard(String),
    /// An optimizer failed to converge under --fail-on-nonconvergence. Exit 5.
    NonConvergence(String),
}

impl CliError {
    pub fn parse(msg: String) -> Self {
        CliError::Parse(msg)
    }

    pub fn semantic(msg: String) -> Self {
        CliError::Semantic(msg)
    }

    pub fn guard(msg: String) -> Self {
        CliError::Guard(msg)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Semantic(_) => 3,
            CliError::Guard(_) => 4,
            CliError::NonConvergence(_) => 5,
        }
    }

    /// Maps a core error at computation time: dimension guards keep their
    /// category, everything else is a semantic failure.
    pub fn from_core(e: qent_core::Error) -> Self {
        match e {
            qent_core::Error::DimensionGuard { dim, limit } => {
                CliError::Guard(format!("dimension {dim} exceeds the limit {limit}"))
            }
            other => CliError::Semantic(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse failure: {m}"),
            CliError::Semantic(m) => write!(f, "semantic failure: {m}"),
            CliError::Guard(m) => write!(f, "dimension guard: {m}"),
            CliError::NonConvergence(m) => write!(f, "non-convergence: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
