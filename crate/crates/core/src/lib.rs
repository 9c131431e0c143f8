//! Desk-scale numerical laboratory for the ternary inequality
//! |p1^c tan^theta(log p1) + p2^c tan^theta(log p2) + p3^c tan^theta(log p3) - N| < epsilon
//! over primes drawn from the window where tan(log y) stays in (4/9, 2].
//!
//! The crate derives the full scale system from (c, theta) and a target,
//! sieves the weighted prime window, builds a compactly supported
//! smoothing kernel with a closed-form Fourier transform, evaluates the
//! exponential sums and oscillatory integrals of the counting argument,
//! and searches for witness triples, cross-checking the smoothed count
//! against its Fourier-side integral.

pub mod error;
pub mod expsum;
pub mod kernel;
pub mod phase;
pub mod primes;
pub mod report;
pub mod scales;
pub mod search;
pub mod sum;

pub use error::{Error, Result};
pub use expsum::{
    integer_exp_sum, integral_exp_sum, major_arc_deviation, prime_exp_sum, AlphaSample,
    IntegerSumBudget, OscillationBudget,
};
pub use kernel::SmoothingKernel;
pub use phase::PhaseContext;
pub use primes::{sieve_range, PrimeTable, SieveBudget};
pub use scales::{derive_scales, window_geometry, DerivedScales, ProblemConfig, Target, WindowGeometry};
pub use search::{
    brute_force_search, gamma0_via_integral, gamma_counts, scaling_probe, search_meet_in_middle,
    GammaCounts, GammaIntegral, PairBudget, SearchOutcome, SearchReport, WitnessTriple,
};
