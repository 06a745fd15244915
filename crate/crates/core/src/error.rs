use thiserror::Error;

/// Errors raised when a model parameter or index is outside its domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is out of range (expected {expected})")]
    OutOfRange { name: &'static str, value: f64, expected: String },

    #[error(
        "power split violates beta0^2 - beta1^2 * eta0 > 0 \
         (beta0^2 = {beta0_sq}, beta1^2 = {beta1_sq}, eta0 = {eta0}); near users would always be in outage"
    )]
    PowerSplit { beta0_sq: f64, beta1_sq: f64, eta0: f64 },

    #[error("{what} index {index} is invalid (expected {expected})")]
    Index { what: &'static str, index: usize, expected: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, value: f64, expected: impl Into<String>) -> Error {
    Error::OutOfRange { name, value, expected: expected.into() }
}
