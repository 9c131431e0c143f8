//! Error types shared across the laboratory.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent c = {c} must lie strictly inside (1, 10/9)")]
    ExponentOutOfRange { c: f64 },

    #[error("tangent power theta = {theta} must be strictly greater than 1")]
    ThetaOutOfRange { theta: f64 },

    #[error("target N = {n} must be positive and finite")]
    TargetNotPositive { n: f64 },

    #[error("window index m = {m} outside supported range 0..={max}")]
    WindowIndexOutOfRange { m: i64, max: u32 },

    #[error("window geometry chain violated for theta = {theta}: {detail}")]
    GeometryChainViolated { theta: f64, detail: String },

    #[error("y = {y} lies outside the phase window ({lo}, {hi}]")]
    OutsidePhaseWindow { y: f64, lo: f64, hi: f64 },

    #[error("phase target t = {t} outside the attainable range [{lo}, {hi}]")]
    PhaseTargetOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("invalid sieve window ({delta1}, {delta2}]: need 2 <= delta1 < delta2, both finite")]
    InvalidSieveWindow { delta1: f64, delta2: f64 },

    #[error("sieve budget exceeded: window needs {required} segments, budget allows {available}")]
    SieveBudgetExceeded { required: u64, available: u64 },

    #[error(
        "oscillation budget exceeded: quadrature needs {required} nodes, budget allows {available}"
    )]
    OscillationBudgetExceeded { required: u64, available: u64 },

    #[error("integer window too large: {count} integers, budget allows {budget}")]
    IntegerWindowTooLarge { count: u64, budget: u64 },

    #[error("pair budget exceeded: search visits up to {required} pairs, budget allows {available}")]
    PairBudgetExceeded { required: u64, available: u64 },

    #[error("table of {len} primes exceeds the brute-force cap of {cap}")]
    TableTooLarge { len: usize, cap: usize },

    #[error("smoothing width epsilon = {epsilon} must be positive and finite")]
    KernelWidthInvalid { epsilon: f64 },

    #[error("smoothing order k = {k} outside supported range 1..={max}")]
    KernelOrderOutOfRange { k: u32, max: u32 },

    #[error("kernel epsilon {kernel_eps} does not match the sharp window epsilon {eps}")]
    KernelScaleMismatch { kernel_eps: f64, eps: f64 },

    #[error("alpha grid needs at least {min} points, got {got}")]
    GridTooSmall { got: usize, min: usize },

    #[error("quadrature grid too coarse: spacing {spacing:e} exceeds the required {required:e}")]
    GridTooCoarse { spacing: f64, required: f64 },

    #[error("prime table carries no phase values; build it against a phase context first")]
    MissingPhaseValues,
}
