//! Compensated summation primitives.
//!
//! Every place the laboratory combines quantities of mixed magnitude goes
//! through these helpers, and all reductions run in a fixed order so that
//! results are bitwise reproducible across runs and thread counts.

use num_complex::Complex64;

/// Neumaier variant of Kahan summation: error is O(eps^2 * n) instead of
/// O(eps * n) for the naive loop.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice in its given order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Complex accumulator with independently compensated parts.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Error-free transform: returns (fl(a + b), roundoff).
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let ap = s - b;
    let bp = s - ap;
    let err = (a - ap) + (b - bp);
    (s, err)
}

/// Error-free product via FMA: returns (fl(a * b), roundoff).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// Compensated three-term sum f1 + f2 + f3.
#[inline]
pub fn triple_sum(f1: f64, f2: f64, f3: f64) -> f64 {
    let (s1, e1) = two_sum(f1, f2);
    let (s2, e2) = two_sum(s1, f3);
    s2 + (e1 + e2)
}

/// Residual of a three-term sum against a target, accurate to a few ulps of
/// the largest operand: (f1 + f2 + f3) - target.
///
/// Both the brute-force search and the pair/binary-search route must call
/// this same function so their acceptance predicates agree exactly.
#[inline]
pub fn triple_residual(f1: f64, f2: f64, f3: f64, target: f64) -> f64 {
    let (s1, e1) = two_sum(f1, f2);
    let (s2, e2) = two_sum(s1, f3);
    let (d, e3) = two_sum(s2, -target);
    d + (e1 + e2 + e3)
}
