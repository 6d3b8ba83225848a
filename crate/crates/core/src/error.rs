use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected} qubits, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("{what} is limited to {cap} qubits, requested {requested}")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        requested: usize,
    },

    #[error("decomposition intractable: term count exceeded the cap of {cap}")]
    Intractable { cap: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors caused by a size limit rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::Intractable { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
