use thiserror::Error;

/// Everything that can go wrong inside the lab.
#[derive(Debug, Error)]
pub enum LabError {
    /// Inputs disagree on shape: element vs group, function vs function.
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity {
        what: String,
        needed: u128,
        cap: u128,
    },
    #[error("could not certify floor at n = {n} (precision escalated to {bits} bits)")]
    Precision { n: u64, bits: u32 },
    #[error("construction violates {condition} at n = {n}")]
    Construction { condition: &'static str, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        LabError::Structural(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        LabError::Parse(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        LabError::Capacity {
            what: what.into(),
            needed,
            cap,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Capacity { .. } => 3,
            LabError::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
