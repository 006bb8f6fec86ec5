use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The mean of the field is too small for the polar decomposition.
    #[error("field mean {modulus:e} is below the admissibility threshold {threshold:e}")]
    ZeroMean { modulus: f64, threshold: f64 },

    /// The field left the admissible domain of the logarithm.
    #[error("field left the logarithm domain: min |f| = {min_modulus:e}, |mean| = {mean_modulus:e}")]
    DomainViolation { min_modulus: f64, mean_modulus: f64 },

    #[error("field vanishes at grid index {index} (|f| = {modulus:e})")]
    ZeroModulus { index: usize, modulus: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("fit window holds {samples} usable samples, at least {required} are needed")]
    DegenerateWindow { samples: usize, required: usize },

    #[error("scan would enumerate {combinations} combinations, budget is {budget}")]
    BudgetExceeded { combinations: u128, budget: u128 },

    #[error("step failed at t = {time}: {source}")]
    Step {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("experiment {name:?}: {source}")]
    Experiment {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }

    /// Strips `Step` and `Experiment` wrappers and returns the underlying failure.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } | Error::Experiment { source, .. } => source.root(),
            other => other,
        }
    }
}
