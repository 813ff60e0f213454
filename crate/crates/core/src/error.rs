use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configured size or depth cap would be exceeded.
    #[error("resource cap exceeded: {what} (limit {limit})")]
    Resource { what: &'static str, limit: u64 },

    /// A time query at or beyond the horizon up to which a path is exact.
    #[error("time {t} is not below the valid horizon {horizon}")]
    Horizon { t: f64, horizon: f64 },

    #[error("out of range: {0}")]
    Range(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no convergence after {sweeps} sweeps (last change {last_change:e})")]
    Iteration { sweeps: usize, last_change: f64 },

    #[error("argument {x} outside the tabulated range [{lo}, {hi}]")]
    Extrapolation { x: f64, lo: f64, hi: f64 },

    #[error("series evaluation at {x} is outside the reliable radius {radius}")]
    Truncation { x: f64, radius: f64 },

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
