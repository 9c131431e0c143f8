//! The phase function f(y) = y^c * tan^theta(log y), its derivatives and
//! its inverse on the monotone window.

use crate::error::{Error, Result};
use crate::scales::{DerivedScales, ProblemConfig};

/// Evaluation context for the phase on one window (delta1, delta2].
///
/// The tangent argument is reduced by pi*m before evaluation so that it
/// lands in (arctan 4/9, arctan 2], where the tangent is well conditioned
/// regardless of how large the window index is.
#[derive(Debug, Clone, Copy)]
pub struct PhaseContext {
    pub c: f64,
    pub theta: f64,
    pub domain_lo: f64,
    pub domain_hi: f64,
    m: u32,
}

impl PhaseContext {
    pub fn new(config: &ProblemConfig, scales: &DerivedScales) -> Self {
        Self {
            c: config.c,
            theta: config.theta,
            domain_lo: scales.delta1,
            domain_hi: scales.delta2,
            m: scales.m,
        }
    }

    pub fn window_index(&self) -> u32 {
        self.m
    }

    #[inline]
    fn check(&self, y: f64) -> Result<()> {
        if y > self.domain_lo && y <= self.domain_hi {
            Ok(())
        } else {
            Err(Error::OutsidePhaseWindow {
                y,
                lo: self.domain_lo,
                hi: self.domain_hi,
            })
        }
    }

    /// tan(log y) via the reduced argument log y - pi*m.
    #[inline]
    pub fn tan_log(&self, y: f64) -> f64 {
        (y.ln() - std::f64::consts::PI * self.m as f64).tan()
    }

    /// f(y) without the window check; the caller guarantees membership.
    #[inline]
    pub fn value_unchecked(&self, y: f64) -> f64 {
        y.powf(self.c) * self.tan_log(y).powf(self.theta)
    }

    /// f(y) = y^c * tan^theta(log y).
    pub fn value(&self, y: f64) -> Result<f64> {
        self.check(y)?;
        Ok(self.value_unchecked(y))
    }

    #[inline]
    pub fn derivative_unchecked(&self, y: f64) -> f64 {
        let t = self.tan_log(y);
        let sec2 = 1.0 + t * t;
        y.powf(self.c - 1.0) * t.powf(self.theta - 1.0) * (self.c * t + self.theta * sec2)
    }

    /// f'(y) = y^(c-1) * tan^(theta-1)(log y) * (c tan(log y) + theta sec^2(log y)),
    /// strictly positive on the window.
    pub fn derivative(&self, y: f64) -> Result<f64> {
        self.check(y)?;
        Ok(self.derivative_unchecked(y))
    }

    /// f''(y) = y^(c-2) * tan^(theta-2)(log y) *
    ///   ((2 theta sec^2 + c^2 - c) tan^2 + (2c-1) theta sec^2 tan + (theta^2 - theta) sec^4).
    pub fn second_derivative(&self, y: f64) -> Result<f64> {
        self.check(y)?;
        let t = self.tan_log(y);
        let s = 1.0 + t * t;
        let c = self.c;
        let th = self.theta;
        let bracket =
            (2.0 * th * s + c * c - c) * t * t + (2.0 * c - 1.0) * th * s * t + (th * th - th) * s * s;
        Ok(y.powf(c - 2.0) * t.powf(th - 2.0) * bracket)
    }

    /// Attainable phase range [f(delta1+), f(delta2)]; f extends
    /// continuously to the open lower end.
    pub fn range(&self) -> (f64, f64) {
        (
            self.value_unchecked(self.domain_lo),
            self.value_unchecked(self.domain_hi),
        )
    }

    /// Invert t = f(y) on the window: bisection down to a relative bracket
    /// of 1e-3, then Newton polish. Monotonicity makes the root unique.
    pub fn invert(&self, t: f64) -> Result<f64> {
        let (f_lo, f_hi) = self.range();
        if !(t >= f_lo && t <= f_hi) || !t.is_finite() {
            return Err(Error::PhaseTargetOutOfRange {
                t,
                lo: f_lo,
                hi: f_hi,
            });
        }
        let mut lo = self.domain_lo;
        let mut hi = self.domain_hi;
        let mut iters = 0usize;
        const MAX_ITERS: usize = 200;

        while hi - lo > 1e-3 * hi && iters < MAX_ITERS {
            let mid = 0.5 * (lo + hi);
            if self.value_unchecked(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            iters += 1;
        }

        let tol = t.abs() * 5e-13;
        let mut y = 0.5 * (lo + hi);
        while iters < MAX_ITERS {
            let fy = self.value_unchecked(y);
            let r = fy - t;
            if r.abs() <= tol {
                break;
            }
            if r > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let step = r / self.derivative_unchecked(y);
            let mut next = y - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            y = next;
            iters += 1;
        }
        Ok(y.clamp(self.domain_lo, self.domain_hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scales::{derive_scales, Target};

    fn ctx_m2() -> PhaseContext {
        let config = ProblemConfig::new(1.05, 2.0, Target::WindowIndex(2));
        let scales = derive_scales(&config).unwrap();
        PhaseContext::new(&config, &scales)
    }

    #[test]
    fn rejects_out_of_window_points() {
        let ctx = ctx_m2();
        assert!(ctx.value(ctx.domain_lo).is_err());
        assert!(ctx.value(ctx.domain_hi * 1.01).is_err());
        assert!(ctx.value(ctx.domain_hi).is_ok());
    }

    #[test]
    fn tangent_at_window_edges() {
        let ctx = ctx_m2();
        // tan(log delta1) = 4/9 and tan(log delta2) = 2 by construction.
        let lo = ctx.tan_log(ctx.domain_lo * (1.0 + 1e-15));
        assert!((lo - 4.0 / 9.0).abs() < 1e-12, "tan at lower edge: {lo}");
        let hi = ctx.tan_log(ctx.domain_hi);
        assert!((hi - 2.0).abs() < 1e-12, "tan at upper edge: {hi}");
    }

    #[test]
    fn value_at_anchor_matches_induced_n() {
        let config = ProblemConfig::new(1.05, 2.0, Target::WindowIndex(2));
        let scales = derive_scales(&config).unwrap();
        let ctx = PhaseContext::new(&config, &scales);
        let f_x = ctx.value(scales.x).unwrap();
        let rel = (3.0 * f_x - scales.n_induced).abs() / scales.n_induced;
        assert!(rel < 1e-12, "3 f(X) vs N_induced rel = {rel:e}");
    }

    #[test]
    fn derivative_matches_hand_expansion_at_anchor() {
        let config = ProblemConfig::new(1.05, 2.0, Target::WindowIndex(2));
        let scales = derive_scales(&config).unwrap();
        let ctx = PhaseContext::new(&config, &scales);
        // tan = 3/2, sec^2 = 1 + 9/4 at y = X.
        let expect = scales.x.powf(0.05) * 1.5 * (1.05 * 1.5 + 2.0 * 3.25);
        let got = ctx.derivative(scales.x).unwrap();
        assert!((got - expect).abs() / expect < 1e-12);

        let bracket = (2.0 * 2.0 * 3.25 + 1.05 * 1.05 - 1.05) * 2.25
            + (2.0 * 1.05 - 1.0) * 2.0 * 3.25 * 1.5
            + (4.0 - 2.0) * 3.25 * 3.25;
        let expect2 = scales.x.powf(1.05 - 2.0) * bracket;
        let got2 = ctx.second_derivative(scales.x).unwrap();
        assert!((got2 - expect2).abs() / expect2.abs() < 1e-12);
    }

    #[test]
    fn invert_round_trips() {
        let ctx = ctx_m2();
        let y = (ctx.domain_lo * ctx.domain_hi).sqrt();
        let t = ctx.value(y).unwrap();
        let back = ctx.invert(t).unwrap();
        assert!((back - y).abs() / y < 1e-10);

        let (f_lo, f_hi) = ctx.range();
        assert!(ctx.invert(f_lo * 0.99).is_err());
        assert!(ctx.invert(f_hi * 1.01).is_err());
    }

    #[test]
    fn implicit_inverse_slope_is_reciprocal_derivative() {
        let ctx = ctx_m2();
        let y = (ctx.domain_lo * ctx.domain_hi).sqrt();
        let t = self_t(&ctx, y);
        let fp = ctx.derivative(y).unwrap();
        // y'(t) from the implicit form equals 1/f'(y).
        let tan = ctx.tan_log(y);
        let sec2 = 1.0 + tan * tan;
        let y_prime = y.powf(1.0 - ctx.c)
            / ((ctx.c * tan + ctx.theta * sec2) * tan.powf(ctx.theta - 1.0));
        assert!((fp * y_prime - 1.0).abs() < 1e-10);

        // And the numeric slope of the inverse agrees.
        let dt = t * 1e-7;
        let slope = (ctx.invert(t + dt).unwrap() - ctx.invert(t - dt).unwrap()) / (2.0 * dt);
        assert!((slope * fp - 1.0).abs() < 1e-5);
    }

    fn self_t(ctx: &PhaseContext, y: f64) -> f64 {
        ctx.value(y).unwrap()
    }
}
