use thiserror::Error;

/// Failure of a CLI run. Each variant maps to its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("malformed value for `{key}`: `{value}` ({reason})")]
    Malformed {
        key: String,
        value: String,
        reason: String,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("numerical integrity failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::UnknownKey(_) => 2,
            CliError::Malformed { .. } => 3,
            CliError::Config(_) => 4,
            CliError::Convergence(_) => 5,
            CliError::Numerical(_) => 6,
        }
    }

    pub(crate) fn malformed(key: &str, value: &str, reason: impl Into<String>) -> Self {
        CliError::Malformed {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<trapfid_core::Error> for CliError {
    fn from(e: trapfid_core::Error) -> Self {
        use trapfid_core::Error as E;
        match e {
            E::InvalidParameter { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Numerical(format!("{other:?}")),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
