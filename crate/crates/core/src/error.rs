use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by model construction, filtering and estimation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parameter {name} = {value} is outside its admissible range {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("series is empty")]
    EmptySeries,
    #[error("times and values differ in length ({times} vs {values})")]
    LengthMismatch { times: usize, values: usize },
    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("duplicate observation times at indices {indices:?}")]
    DuplicateTimes { indices: Vec<usize> },
    #[error("times are not increasing at index {index}")]
    UnsortedTimes { index: usize },
    #[error("gap {gap} at index {index} is below 1; the time grid is not normalized")]
    GapTooSmall { index: usize, gap: f64 },
    #[error("innovation variance factor fell to {value:e} at index {index}")]
    VarianceFactorUnderflow { index: usize, value: f64 },
    #[error("all prediction errors are zero; the data are degenerate")]
    DegenerateData,
    #[error("log-likelihood is not finite")]
    NonFiniteLikelihood,
    #[error("optimizer failed at every start: {detail}")]
    OptimizerFailed { detail: String },
    #[error("standard error unavailable")]
    StandardErrorUnavailable,
    #[error("coverage {0} must lie in [0, 1)")]
    InvalidCoverage(f64),
    #[error("significance level {0} must lie in (0, 1)")]
    InvalidLevel(f64),
    #[error("max lag {max_lag} must be at least 1 and below the sample size {n}")]
    InvalidLag { max_lag: usize, n: usize },
    #[error("residuals have zero variance")]
    ZeroVariance,
    #[error("need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
