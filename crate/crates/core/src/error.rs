use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A family parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A user-supplied generator or Pickands function failed a shape check.
    #[error("validation failed at {at}: {reason}")]
    Validation { at: f64, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The check is not defined for this copula (e.g. d-TP2 without a density).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A function sampled for a log-convexity/concavity test was not positive.
    #[error("domain error at x = {x}: f(x) = {value} is not positive")]
    Domain { x: f64, value: f64 },

    /// A witness constructor was called outside its hypotheses.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A witness constructor exhausted its budget.
    #[error("witness search failed: {0}")]
    SearchFailed(String),

    #[error("unknown family `{0}` (known: {known})", known = crate::registry::FAMILIES.join(", "))]
    UnknownFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
