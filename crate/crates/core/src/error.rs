use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed game document: {0}")]
    Malformed(String),
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("{what} budget exceeded: {detail}")]
    Budget { what: &'static str, detail: String },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn budget(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Budget { what, detail: detail.into() }
    }

    /// True for resource-limit aborts (CLI exit code 2).
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
