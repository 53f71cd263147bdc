use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration violated one of its invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Gaussian conditioning on a coordinate whose variance is (near) zero.
    #[error("cannot condition on coordinate {coord} with variance {variance:e}")]
    DegenerateConditioning { coord: &'static str, variance: f64 },

    /// A quantity that has no finite value for the given arguments.
    #[error("undefined: {0}")]
    Undefined(String),

    /// The exact simulator would exceed its amplitude budget.
    #[error("exact state of {amplitudes} amplitudes exceeds the limit of {limit}")]
    StateTooLarge { amplitudes: u128, limit: u64 },

    /// A checked numerical or statistical invariant did not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
