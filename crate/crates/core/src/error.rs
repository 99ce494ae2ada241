use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid radius measure: {0}")]
    InvalidMeasure(&'static str),
    #[error("scale factor must be positive, got {0}")]
    InvalidScale(f64),
    #[error("F + hG is not a measure: weight {weight} at radius {lo}..{hi}")]
    NotAMeasure { lo: f64, hi: f64, weight: f64 },
    #[error("quantile level must lie in [0, 1), got {0}")]
    InvalidQuantile(f64),
    #[error("intensity must be finite and non-negative, got {0}")]
    InvalidIntensity(f64),
    #[error("expected point count {expected} exceeds cap {cap}")]
    TooManyPoints { expected: f64, cap: u64 },
    #[error("configurations live in different windows")]
    WindowMismatch,
    #[error("mark radius {radius} outside (0, {bound}]")]
    InvalidMark { radius: f64, bound: f64 },
    #[error("target set reaches radius {extent}, must lie within B_(n-2b) = {limit}")]
    TargetTooLarge { extent: f64, limit: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires dimension >= {min}, got {got}")]
    DimensionError { min: usize, got: usize },
    #[error("invalid window: {0}")]
    InvalidWindow(&'static str),
    #[error("crossing probability does not bracket 1/2 at size {size}: p({lo}) = {p_lo}, p({hi}) = {p_hi}")]
    NoBracket {
        size: f64,
        lo: f64,
        hi: f64,
        p_lo: f64,
        p_hi: f64,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
