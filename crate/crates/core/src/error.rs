use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A rate, probability or count is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The queue has no steady state for these parameters.
    #[error("unstable configuration: requires {condition}")]
    Unstable { condition: String },

    /// The closed form has a removable singularity at these parameters.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Two independent numerical routes disagree.
    #[error("numerical cross-check failed: {0}")]
    NumericalMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn unstable(condition: impl Into<String>) -> Self {
        Error::Unstable { condition: condition.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors that describe the model (stability, degenerate or
    /// invalid parameters) rather than the way the tool was invoked.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Config(_))
    }
}
