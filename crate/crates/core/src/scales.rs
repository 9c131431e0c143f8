//! Scale system: from (c, theta) and a target N or window index m, derive
//! every quantity the rest of the laboratory reads.
//!
//! The anchor identity is log X = pi*m + arctan(3/2) with m the window
//! index; the prime window (delta1, delta2] is the stretch on which
//! tan(log y) stays inside (4/9, 2], so the phase y^c * tan^theta(log y)
//! is positive, finite and strictly increasing there.

use crate::error::{Error, Result};

/// Upper exponent limit 10/9, exclusive.
pub const C_SUP: f64 = 10.0 / 9.0;

/// Largest supported window index. Beyond this X^(3c) leaves the f64
/// range for exponents near 10/9; desk scale never needs more.
pub const MAX_WINDOW_INDEX: u32 = 64;

#[inline]
pub(crate) fn arctan_3_2() -> f64 {
    1.5f64.atan()
}

#[inline]
pub(crate) fn arctan_4_9() -> f64 {
    (4.0f64 / 9.0).atan()
}

#[inline]
pub(crate) fn arctan_2() -> f64 {
    2.0f64.atan()
}

/// The experiment target: either the inequality's right-hand side N, or a
/// window index m selecting the admissible scale directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    N(f64),
    WindowIndex(u32),
}

/// The triple (c, theta) plus a target; the identity of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConfig {
    pub c: f64,
    pub theta: f64,
    pub target: Target,
}

impl ProblemConfig {
    pub fn new(c: f64, theta: f64, target: Target) -> Self {
        Self { c, theta, target }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 1.0 && self.c < C_SUP) || !self.c.is_finite() {
            return Err(Error::ExponentOutOfRange { c: self.c });
        }
        if !(self.theta > 1.0) || !self.theta.is_finite() {
            return Err(Error::ThetaOutOfRange { theta: self.theta });
        }
        match self.target {
            Target::N(n) => {
                if !(n > 0.0) || !n.is_finite() {
                    return Err(Error::TargetNotPositive { n });
                }
            }
            Target::WindowIndex(m) => {
                if m > MAX_WINDOW_INDEX {
                    return Err(Error::WindowIndexOutOfRange {
                        m: m as i64,
                        max: MAX_WINDOW_INDEX,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Every derived scale quantity. All downstream operations read these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Window index, the value of [log X / pi].
    pub m: u32,
    /// The anchor scale, exp(pi*m + arctan(3/2)).
    pub x: f64,
    /// Inequality tolerance X^((1/c)(c - 10/9)).
    pub epsilon: f64,
    /// Major-arc radius X^(1/9 - c).
    pub tau: f64,
    /// Intermediate-arc cutoff X^(10/9 - c).
    pub h: f64,
    /// Window lower end exp(pi*m + arctan(4/9)).
    pub delta1: f64,
    /// Window upper end exp(pi*m + arctan 2).
    pub delta2: f64,
    /// The N for which the anchor identity holds exactly with this X.
    pub n_induced: f64,
    /// Echo of a requested N, when the target was N.
    pub n_requested: Option<f64>,
    /// |N - N_induced| / N, when the target was N.
    pub n_mismatch_rel: Option<f64>,
}

/// Derive the full scale system from a validated configuration.
///
/// With a window-index target, X is pinned directly. With an N target the
/// anchor identity only admits a discrete set of X, so the nearest integer
/// index is chosen and the induced N plus relative mismatch are reported.
pub fn derive_scales(config: &ProblemConfig) -> Result<DerivedScales> {
    config.validate()?;
    let c = config.c;
    let theta = config.theta;

    let (m, n_requested) = match config.target {
        Target::WindowIndex(m) => (m, None),
        Target::N(n) => {
            // R = (1/c) log(2^theta N / 3^(theta+1))
            let r = (theta * 2f64.ln() + n.ln() - (theta + 1.0) * 3f64.ln()) / c;
            let m_real = (r - arctan_3_2()) / std::f64::consts::PI;
            let m_round = m_real.round();
            if m_round < 0.0 || m_round > MAX_WINDOW_INDEX as f64 {
                return Err(Error::WindowIndexOutOfRange {
                    m: m_round as i64,
                    max: MAX_WINDOW_INDEX,
                });
            }
            (m_round as u32, Some(n))
        }
    };

    let pm = std::f64::consts::PI * m as f64;
    let x = (pm + arctan_3_2()).exp();
    let epsilon = x.powf((c - C_SUP) / c);
    let tau = x.powf(1.0 / 9.0 - c);
    let h = x.powf(C_SUP - c);
    let delta1 = (pm + arctan_4_9()).exp();
    let delta2 = (pm + arctan_2()).exp();
    let n_induced = 3.0 * 1.5f64.powf(theta) * x.powf(c);
    let n_mismatch_rel = n_requested.map(|n| (n - n_induced).abs() / n);

    Ok(DerivedScales {
        m,
        x,
        epsilon,
        tau,
        h,
        delta1,
        delta2,
        n_induced,
        n_requested,
        n_mismatch_rel,
    })
}

/// Interior window geometry: the lambda/mu sub-window on which the
/// triple-sum counting argument localizes its two free variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowGeometry {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub lambda: f64,
    pub mu: f64,
    pub delta_lambda: f64,
    pub delta_mu: f64,
}

/// Choose lambda and mu as the 1/3 and 2/3 interior points of the
/// admissible open interval and verify the full ordering chain
/// 4/9 < 3/2 < lambda_lo < lambda < mu < lambda_hi < 2 numerically.
///
/// The chain closes up as theta approaches 1; if working precision cannot
/// separate the links a structured error is returned, never a silently
/// wrong geometry.
pub fn window_geometry(config: &ProblemConfig, scales: &DerivedScales) -> Result<WindowGeometry> {
    config.validate()?;
    let theta = config.theta;
    // 3^(theta+1) / 2^theta = 3 * 1.5^theta
    let ratio = 3.0 * 1.5f64.powf(theta);
    let lambda_lo = (0.4 * (ratio - 0.75)).powf(1.0 / theta);
    let lambda_hi = (0.4 * (ratio - 2.0 / 3.0)).powf(1.0 / theta);
    let lambda = lambda_lo + (lambda_hi - lambda_lo) / 3.0;
    let mu = lambda_lo + 2.0 * (lambda_hi - lambda_lo) / 3.0;

    let chain = [
        (4.0 / 9.0, "4/9"),
        (1.5, "3/2"),
        (lambda_lo, "lambda_lo"),
        (lambda, "lambda"),
        (mu, "mu"),
        (lambda_hi, "lambda_hi"),
        (2.0, "2"),
    ];
    for pair in chain.windows(2) {
        if !(pair[0].0 < pair[1].0) {
            return Err(Error::GeometryChainViolated {
                theta,
                detail: format!(
                    "{} = {:e} not strictly below {} = {:e}",
                    pair[0].1, pair[0].0, pair[1].1, pair[1].0
                ),
            });
        }
    }

    let pm = std::f64::consts::PI * scales.m as f64;
    let delta_lambda = (pm + lambda.atan()).exp();
    let delta_mu = (pm + mu.atan()).exp();
    if !(scales.delta1 < delta_lambda && delta_lambda < delta_mu && delta_mu < scales.delta2) {
        return Err(Error::GeometryChainViolated {
            theta,
            detail: "interior window left the prime window".to_string(),
        });
    }

    Ok(WindowGeometry {
        lambda_lo,
        lambda_hi,
        lambda,
        mu,
        delta_lambda,
        delta_mu,
    })
}
