//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or malformed input data.
    #[error("input error: {0}")]
    Input(String),
    /// A theory-mode repetition or branch count exceeds the configured budget.
    /// `required` is reported as a float because it can exceed `u64::MAX`.
    #[error("budget error: required {required:.3e} runs, budget {budget}")]
    Budget { required: f64, budget: u64 },
    /// No feasible solution exists for the requested instance.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
