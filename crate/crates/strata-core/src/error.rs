use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("domain error [{clause}]: {location}")]
    Domain { clause: String, location: String },
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(clause: impl Into<String>, location: impl Into<String>) -> Self {
        Error::Domain {
            clause: clause.into(),
            location: location.into(),
        }
    }

    pub fn precision(location: impl Into<String>) -> Self {
        Error::Precision(location.into())
    }

    /// The named clause for domain errors, a fixed tag otherwise.
    pub fn clause(&self) -> &str {
        match self {
            Error::Schema(_) => "schema",
            Error::Domain { clause, .. } => clause,
            Error::Precision(_) => "precision",
            Error::Internal(_) => "internal",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) => 1,
            Error::Domain { .. } | Error::Internal(_) => 2,
            Error::Precision(_) => 3,
        }
    }
}
