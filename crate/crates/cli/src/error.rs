use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag combinations. Exit code 2.
    #[error("usage: {0}")]
    Usage(String),

    /// A computation failed or a checked property did not hold. Exit code 1.
    #[error("{0}")]
    Internal(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<racap_core::Error> for CliError {
    fn from(e: racap_core::Error) -> Self {
        match e {
            racap_core::Error::Domain(msg) => CliError::Usage(msg),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<csv::IntoInnerError<csv::Writer<Vec<u8>>>> for CliError {
    fn from(e: csv::IntoInnerError<csv::Writer<Vec<u8>>>) -> Self {
        CliError::Internal(e.to_string())
    }
}
