use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration key violates its constraint.
    #[error("invalid `{key}`: {constraint}")]
    Invalid { key: String, constraint: String },

    /// A conserved quantity drifted beyond tolerance; usually the step is too large.
    #[error(
        "integration diverged at t = {time}: {quantity} drift {drift:.3e} exceeds {tolerance:.1e}"
    )]
    Diverged {
        time: f64,
        quantity: &'static str,
        drift: f64,
        tolerance: f64,
    },

    /// Per-step discarded weight of an MPS truncation exceeded the ceiling.
    #[error("truncation blow-up at t = {time}: discarded weight {weight:.3e} per step exceeds {ceiling:.1e}")]
    TruncationBlowUp {
        time: f64,
        weight: f64,
        ceiling: f64,
    },

    #[error("linear algebra failure: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    TomlDe(#[from] toml::de::Error),

    #[error("config serialize error: {0}")]
    TomlSer(#[from] toml::ser::Error),
}

impl Error {
    pub fn invalid(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Invalid {
            key: key.into(),
            constraint: constraint.into(),
        }
    }
}
