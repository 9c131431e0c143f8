//! Windowed prime tables: segmented sieve, log weights and precomputed
//! phase values over (delta1, delta2].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase::PhaseContext;
use crate::sum::CompensatedSum;

/// Odd numbers per sieve segment (2^16), bit-packed into u64 words.
const SEGMENT_ODDS: u64 = 1 << 16;

/// Memory budget for sieving, expressed as the largest admissible window
/// upper end.
#[derive(Debug, Clone, Copy)]
pub struct SieveBudget {
    pub max_upper: f64,
}

impl Default for SieveBudget {
    fn default() -> Self {
        // Windows beyond 1e8 are out of scope for the laboratory.
        Self { max_upper: 1e8 }
    }
}

fn segments_for(upper: f64) -> u64 {
    (upper.max(0.0) as u64 / (2 * SEGMENT_ODDS)) + 1
}

/// Primes p with delta1 < p <= delta2, ascending. The real-valued window
/// ends are honored exactly: the integer range is
/// [floor(delta1)+1, floor(delta2)], never a rounded approximation.
pub fn sieve_range(delta1: f64, delta2: f64, budget: &SieveBudget) -> Result<Vec<u64>> {
    if !(delta1 >= 2.0 && delta1 < delta2) || !delta2.is_finite() {
        return Err(Error::InvalidSieveWindow { delta1, delta2 });
    }
    if delta2 > budget.max_upper {
        return Err(Error::SieveBudgetExceeded {
            required: segments_for(delta2),
            available: segments_for(budget.max_upper),
        });
    }
    let lo = (delta1.floor() as u64 + 1).max(3);
    let hi = delta2.floor() as u64;
    if hi < lo {
        return Ok(Vec::new());
    }

    // Base odd primes up to sqrt(hi) by a plain sieve.
    let root = hi.isqrt();
    let mut base_is_comp = vec![false; (root + 1) as usize];
    let mut base: Vec<u64> = Vec::new();
    let mut i = 3u64;
    while i <= root {
        if !base_is_comp[i as usize] {
            base.push(i);
            let mut j = i * i;
            while j <= root {
                base_is_comp[j as usize] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }

    // Segments over odd numbers only; each covers 2*SEGMENT_ODDS integers.
    let first_odd = if lo % 2 == 0 { lo + 1 } else { lo };
    let seg_count = ((hi.saturating_sub(first_odd)) / (2 * SEGMENT_ODDS)) + 1;
    let mut chunks: Vec<Vec<u64>> = (0..seg_count)
        .into_par_iter()
        .map(|s| {
            let seg_lo = first_odd + s * 2 * SEGMENT_ODDS;
            let seg_hi = (seg_lo + 2 * SEGMENT_ODDS - 2).min(hi);
            sieve_segment(seg_lo, seg_hi, &base)
        })
        .collect();
    let mut primes = Vec::new();
    for chunk in chunks.iter_mut() {
        primes.append(chunk);
    }
    Ok(primes)
}

/// Sieve odd numbers in [seg_lo, seg_hi] (both odd-aligned) against the
/// base primes; returns the primes in order.
fn sieve_segment(seg_lo: u64, seg_hi: u64, base: &[u64]) -> Vec<u64> {
    debug_assert!(seg_lo % 2 == 1);
    let n_odds = ((seg_hi.saturating_sub(seg_lo)) / 2 + 1) as usize;
    let mut bits = vec![0u64; n_odds.div_ceil(64)];
    for &p in base {
        if p * p > seg_hi {
            break;
        }
        let mut start = p * p;
        if start < seg_lo {
            let k = (seg_lo - start).div_ceil(2 * p);
            start += k * 2 * p;
        }
        // start is odd (odd prime squared stepped by 2p stays odd).
        let mut idx = (start - seg_lo) / 2;
        while idx < n_odds as u64 {
            bits[(idx / 64) as usize] |= 1u64 << (idx % 64);
            idx += p;
        }
    }
    let mut out = Vec::new();
    for idx in 0..n_odds as u64 {
        if bits[(idx / 64) as usize] & (1u64 << (idx % 64)) == 0 {
            let n = seg_lo + 2 * idx;
            if n >= 3 {
                out.push(n);
            }
        }
    }
    out
}

/// Sorted primes in (delta1, delta2] with log weights and, when built
/// against a phase context, precomputed phase values f(p).
#[derive(Debug, Clone)]
pub struct PrimeTable {
    primes: Vec<u64>,
    log_weights: Vec<f64>,
    phase_values: Vec<f64>,
    theta_sum: f64,
}

impl PrimeTable {
    /// Sieve a raw window; log weights and the Chebyshev sum are filled,
    /// phase values stay empty.
    pub fn sieve(delta1: f64, delta2: f64, budget: &SieveBudget) -> Result<Self> {
        let primes = sieve_range(delta1, delta2, budget)?;
        let log_weights: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let mut acc = CompensatedSum::new();
        for &w in &log_weights {
            acc.add(w);
        }
        Ok(Self {
            primes,
            log_weights,
            theta_sum: acc.value(),
            phase_values: Vec::new(),
        })
    }

    /// Attach phase values f(p) from the context; every prime must lie in
    /// the context window.
    pub fn with_phases(mut self, ctx: &PhaseContext) -> Result<Self> {
        let mut vals = Vec::with_capacity(self.primes.len());
        for &p in &self.primes {
            vals.push(ctx.value(p as f64)?);
        }
        debug_assert!(vals.windows(2).all(|w| w[0] < w[1]));
        self.phase_values = vals;
        Ok(self)
    }

    /// Sieve the window of a derived scale set and attach phases.
    pub fn for_window(ctx: &PhaseContext, budget: &SieveBudget) -> Result<Self> {
        Self::sieve(ctx.domain_lo, ctx.domain_hi, budget)?.with_phases(ctx)
    }

    /// Sub-table over (lo, hi], keeping weights and phases.
    pub fn slice_by_value(&self, lo: f64, hi: f64) -> Self {
        let start = self.primes.partition_point(|&p| (p as f64) <= lo);
        let end = self.primes.partition_point(|&p| (p as f64) <= hi);
        let primes = self.primes[start..end].to_vec();
        let log_weights = self.log_weights[start..end].to_vec();
        let phase_values = if self.phase_values.is_empty() {
            Vec::new()
        } else {
            self.phase_values[start..end].to_vec()
        };
        let mut acc = CompensatedSum::new();
        for &w in &log_weights {
            acc.add(w);
        }
        Self {
            primes,
            log_weights,
            phase_values,
            theta_sum: acc.value(),
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn phase_values(&self) -> &[f64] {
        &self.phase_values
    }

    pub fn has_phases(&self) -> bool {
        !self.phase_values.is_empty() || self.primes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Chebyshev-style sum of log p over the table.
    pub fn chebyshev_theta(&self) -> f64 {
        self.theta_sum
    }
}
