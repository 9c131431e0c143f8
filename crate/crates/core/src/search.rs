//! Witness-triple search: prime triples whose phase values land within
//! epsilon of the target, the sharp and smoothed log-weighted counts, and
//! the Fourier-side cross-check of the smoothed count.
//!
//! Witnesses are stored as unordered multisets p1 <= p2 <= p3; the ordered
//! count is recovered through the multiplicity factors 6 / 3 / 1 (all
//! distinct / one repeated pair / all equal).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::{e_unit, exp_sum_grid, unit_phase};
use crate::kernel::SmoothingKernel;
use crate::phase::PhaseContext;
use crate::primes::{PrimeTable, SieveBudget};
use crate::scales::{derive_scales, DerivedScales, ProblemConfig, Target};
use crate::sum::{triple_residual, triple_sum, CompensatedSum};

/// Cubic-cost guard for the reference search.
pub const BRUTE_FORCE_CAP: usize = 500;

/// Work guard for the pair scan.
#[derive(Debug, Clone, Copy)]
pub struct PairBudget {
    pub max_pairs: u64,
}

impl Default for PairBudget {
    fn default() -> Self {
        Self {
            max_pairs: 2_000_000_000,
        }
    }
}

/// One unordered witness multiset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessTriple {
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
    /// f(p1) + f(p2) + f(p3), compensated.
    pub value: f64,
    /// value - N, compensated; strictly inside (-eps, eps).
    pub residual: f64,
    /// log p1 * log p2 * log p3.
    pub weight: f64,
}

/// Enumeration result, possibly truncated to a caller-chosen cap; the
/// total count always reflects the full witness set.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub witnesses: Vec<WitnessTriple>,
    pub total_count: u64,
    pub truncated: bool,
}

/// Exhaustive reference search over all unordered triples.
pub fn brute_force_search(table: &PrimeTable, n: f64, eps: f64) -> Result<Vec<WitnessTriple>> {
    if table.len() > BRUTE_FORCE_CAP {
        return Err(Error::TableTooLarge {
            len: table.len(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    if !table.has_phases() {
        return Err(Error::MissingPhaseValues);
    }
    let f = table.phase_values();
    let w = table.log_weights();
    let p = table.primes();
    let mut out = Vec::new();
    for i in 0..f.len() {
        for j in i..f.len() {
            for k in j..f.len() {
                let r = triple_residual(f[i], f[j], f[k], n);
                if r.abs() < eps {
                    out.push(WitnessTriple {
                        p1: p[i],
                        p2: p[j],
                        p3: p[k],
                        value: triple_sum(f[i], f[j], f[k]),
                        residual: r,
                        weight: w[i] * w[j] * w[k],
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Scan all pairs (i <= j) of one row range, walking two candidate
/// pointers over the sorted phase values; every candidate inside the
/// widened bracket is re-checked with the same compensated residual
/// predicate the brute force uses, so the two searches agree exactly.
fn scan_rows<V: FnMut(usize, usize, usize, f64)>(
    f: &[f64],
    n: f64,
    eps: f64,
    rows: std::ops::Range<usize>,
    visit: &mut V,
) {
    let len = f.len();
    for i in rows {
        let fi = f[i];
        let mut k_lo = len; // first index with f > lo_bound
        let mut k_end = len; // first index with f >= hi_bound
        for j in i..len {
            let base = fi + f[j];
            let margin = 1e-13 * (n.abs() + base.abs() + 1.0);
            let hi_bound = n + eps - base + margin;
            if f[j] > hi_bound {
                // Even p3 = p2 overshoots, and bounds only move down.
                break;
            }
            let lo_bound = n - eps - base - margin;
            while k_lo > 0 && f[k_lo - 1] > lo_bound {
                k_lo -= 1;
            }
            while k_end > 0 && f[k_end - 1] >= hi_bound {
                k_end -= 1;
            }
            for k in k_lo.max(j)..k_end {
                let r = triple_residual(fi, f[j], f[k], n);
                if r.abs() < eps {
                    visit(i, j, k, r);
                }
            }
        }
    }
}

const ROW_CHUNK: usize = 64;

fn check_pair_budget(len: usize, budget: &PairBudget) -> Result<()> {
    let pairs = (len as u64) * (len as u64 + 1) / 2;
    if pairs > budget.max_pairs {
        return Err(Error::PairBudgetExceeded {
            required: pairs,
            available: budget.max_pairs,
        });
    }
    Ok(())
}

/// Pair-plus-binary-narrowing search; result set equals the brute force
/// exactly. Output is canonically ordered and truncated to `max_out`
/// (total_count still covers everything).
pub fn search_meet_in_middle(
    table: &PrimeTable,
    n: f64,
    eps: f64,
    max_out: usize,
    budget: &PairBudget,
) -> Result<SearchOutcome> {
    if !table.has_phases() {
        return Err(Error::MissingPhaseValues);
    }
    check_pair_budget(table.len(), budget)?;
    let f = table.phase_values();
    let w = table.log_weights();
    let p = table.primes();

    let chunks: Vec<(u64, Vec<WitnessTriple>)> = (0..f.len())
        .into_par_iter()
        .step_by(ROW_CHUNK)
        .map(|start| {
            let rows = start..(start + ROW_CHUNK).min(f.len());
            let mut found = Vec::new();
            let mut count = 0u64;
            scan_rows(f, n, eps, rows, &mut |i, j, k, r| {
                count += 1;
                found.push(WitnessTriple {
                    p1: p[i],
                    p2: p[j],
                    p3: p[k],
                    value: triple_sum(f[i], f[j], f[k]),
                    residual: r,
                    weight: w[i] * w[j] * w[k],
                });
            });
            (count, found)
        })
        .collect();

    let total_count: u64 = chunks.iter().map(|(c, _)| c).sum();
    let mut witnesses = Vec::new();
    for (_, mut chunk) in chunks {
        if witnesses.len() < max_out {
            let room = max_out - witnesses.len();
            if chunk.len() > room {
                chunk.truncate(room);
            }
            witnesses.append(&mut chunk);
        }
    }
    let truncated = (witnesses.len() as u64) < total_count;
    Ok(SearchOutcome {
        witnesses,
        total_count,
        truncated,
    })
}

/// Sharp and smoothed log-weighted counts.
#[derive(Debug, Clone, Copy)]
pub struct GammaCounts {
    /// Number of unordered witness multisets.
    pub witness_count: u64,
    /// Ordered sharp count: sum of multiplicity * weight over witnesses.
    pub gamma_sharp: f64,
    /// Ordered smoothed count: sum of multiplicity * weight * psi(residual).
    pub gamma0_direct: f64,
}

#[inline]
fn multiplicity(i: usize, j: usize, k: usize) -> f64 {
    if i == j && j == k {
        1.0
    } else if i == j || j == k {
        3.0
    } else {
        6.0
    }
}

/// Stream the witness set once, accumulating the sharp count and the
/// psi-weighted count. The kernel must carry the same epsilon as the sharp
/// window: psi vanishes outside it, so the narrowing loses nothing.
pub fn gamma_counts(
    table: &PrimeTable,
    kernel: &SmoothingKernel,
    n: f64,
    sharp_eps: f64,
    budget: &PairBudget,
) -> Result<GammaCounts> {
    if kernel.epsilon != sharp_eps {
        return Err(Error::KernelScaleMismatch {
            kernel_eps: kernel.epsilon,
            eps: sharp_eps,
        });
    }
    if !table.has_phases() {
        return Err(Error::MissingPhaseValues);
    }
    check_pair_budget(table.len(), budget)?;
    let f = table.phase_values();
    let w = table.log_weights();

    let chunks: Vec<(u64, f64, f64)> = (0..f.len())
        .into_par_iter()
        .step_by(ROW_CHUNK)
        .map(|start| {
            let rows = start..(start + ROW_CHUNK).min(f.len());
            let mut count = 0u64;
            let mut sharp = CompensatedSum::new();
            let mut smooth = CompensatedSum::new();
            scan_rows(f, n, sharp_eps, rows, &mut |i, j, k, r| {
                count += 1;
                let mw = multiplicity(i, j, k) * w[i] * w[j] * w[k];
                sharp.add(mw);
                smooth.add(mw * kernel.psi(r));
            });
            (count, sharp.value(), smooth.value())
        })
        .collect();

    let mut count = 0u64;
    let mut sharp = CompensatedSum::new();
    let mut smooth = CompensatedSum::new();
    for (c, s, g) in chunks {
        count += c;
        sharp.add(s);
        smooth.add(g);
    }
    Ok(GammaCounts {
        witness_count: count,
        gamma_sharp: sharp.value(),
        gamma0_direct: smooth.value(),
    })
}

/// The Fourier-side smoothed count, split at the arc boundaries.
#[derive(Debug, Clone, Copy)]
pub struct GammaIntegral {
    /// Major-arc part: integral over [-tau, tau] of S^3 Psi e(-N alpha).
    pub gamma1: f64,
    /// Intermediate part over tau <= |alpha| <= H.
    pub gamma2: f64,
    /// Analytic bound on the discarded |alpha| > H tail, from the k-th
    /// power branch of the kernel envelope.
    pub gamma3_bound: f64,
    /// gamma1 + gamma2.
    pub total: f64,
    /// Grid nodes at the final refinement (both parts combined).
    pub nodes: usize,
    pub refinements: u32,
    pub converged: bool,
}

/// Refinement policy for the Fourier-side integral.
#[derive(Debug, Clone, Copy)]
pub struct GammaQuadOpts {
    /// Grid nodes per unit of net frequency (3 f_max vs N).
    pub nodes_per_freq: f64,
    pub rel_agree: f64,
    pub max_nodes: usize,
}

impl Default for GammaQuadOpts {
    fn default() -> Self {
        Self {
            nodes_per_freq: 16.0,
            rel_agree: 0.005,
            max_nodes: 1 << 23,
        }
    }
}

/// Simpson integral of Re(S^3(alpha) Psi(alpha) e(-N alpha)) over
/// [lo, lo + (nodes-1) h], nodes odd.
fn gamma_part(
    table: &PrimeTable,
    kernel: &SmoothingKernel,
    n: f64,
    lo: f64,
    hi: f64,
    nodes: usize,
) -> f64 {
    let h = (hi - lo) / (nodes as f64 - 1.0);
    let s_vals = exp_sum_grid(table, lo, h, nodes);
    let mut acc = CompensatedSum::new();
    for (idx, s) in s_vals.iter().enumerate() {
        let alpha = lo + h * idx as f64;
        let cube = s * s * s;
        let twist = e_unit(unit_phase(-n, alpha));
        let g = (cube * twist).re * kernel.psi_fourier(alpha);
        let w = if idx == 0 || idx == nodes - 1 {
            1.0
        } else if idx % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * g);
    }
    acc.value() * h / 3.0
}

/// Compute gamma1 and gamma2 numerically and bound gamma3 analytically.
/// The real integrand is even, so each part is twice its half-line
/// integral. Refinement doubles the grid until two passes agree.
pub fn gamma0_via_integral(
    table: &PrimeTable,
    kernel: &SmoothingKernel,
    scales: &DerivedScales,
    n: f64,
    opts: &GammaQuadOpts,
) -> Result<GammaIntegral> {
    if !table.has_phases() {
        return Err(Error::MissingPhaseValues);
    }
    if table.is_empty() {
        return Ok(GammaIntegral {
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3_bound: 0.0,
            total: 0.0,
            nodes: 0,
            refinements: 0,
            converged: true,
        });
    }
    let f = table.phase_values();
    let f_min = f[0];
    let f_max = f[f.len() - 1];
    let net_freq = (3.0 * f_max - n).abs().max((n - 3.0 * f_min).abs()).max(1.0);
    // The cubed sum twisted by e(-N alpha) carries net frequencies up to
    // net_freq; refuse grids that cannot resolve that oscillation.
    if opts.nodes_per_freq < 8.0 {
        return Err(Error::GridTooCoarse {
            spacing: 1.0 / (opts.nodes_per_freq * net_freq),
            required: 1.0 / (8.0 * net_freq),
        });
    }
    let mut spacing = 1.0 / (opts.nodes_per_freq * net_freq);
    if spacing > scales.tau {
        spacing = scales.tau;
    }

    let odd_nodes = |width: f64, sp: f64| -> usize { (((width / sp).ceil() as usize) | 1).max(5) };

    let mut n1 = odd_nodes(scales.tau, spacing);
    let mut n2 = odd_nodes(scales.h - scales.tau, spacing);
    let mut g1 = gamma_part(table, kernel, n, 0.0, scales.tau, n1);
    let mut g2 = gamma_part(table, kernel, n, scales.tau, scales.h, n2);
    let mut refinements = 0;
    let mut converged = false;
    while (n1 + n2) * 2 <= opts.max_nodes {
        let m1 = 2 * n1 - 1;
        let m2 = 2 * n2 - 1;
        let h1 = gamma_part(table, kernel, n, 0.0, scales.tau, m1);
        let h2 = gamma_part(table, kernel, n, scales.tau, scales.h, m2);
        refinements += 1;
        let prev = g1 + g2;
        let next = h1 + h2;
        let agree = (next - prev).abs() <= opts.rel_agree * next.abs().max(f64::MIN_POSITIVE);
        g1 = h1;
        g2 = h2;
        n1 = m1;
        n2 = m2;
        if agree {
            converged = true;
            break;
        }
    }

    let sup_s = table.chebyshev_theta();
    let gamma3_bound = 2.0 * sup_s.powi(3) * kernel.bound_tail_beyond(scales.h);
    Ok(GammaIntegral {
        gamma1: 2.0 * g1,
        gamma2: 2.0 * g2,
        gamma3_bound,
        total: 2.0 * (g1 + g2),
        nodes: n1 + n2,
        refinements,
        converged,
    })
}

/// Extend the Fourier-side integral beyond the intermediate cutoff:
/// 2 Re of the integral of S^3 Psi e(-N alpha) over [from, to], walked in
/// bounded-memory chunks. Used to reconcile the truncated total with the
/// direct count: past `to`, only the envelope tail bound remains.
pub fn gamma_tail_extension(
    table: &PrimeTable,
    kernel: &SmoothingKernel,
    n: f64,
    from: f64,
    to: f64,
    nodes_per_freq: f64,
) -> f64 {
    let f = table.phase_values();
    if f.is_empty() || to <= from {
        return 0.0;
    }
    let f_min = f[0];
    let f_max = f[f.len() - 1];
    let net_freq = (3.0 * f_max - n).abs().max((n - 3.0 * f_min).abs()).max(1.0);
    let spacing = 1.0 / (nodes_per_freq.max(8.0) * net_freq);
    const CHUNK: usize = 1 << 19;
    let mut acc = CompensatedSum::new();
    let mut lo = from;
    while lo < to {
        let hi = (lo + spacing * (CHUNK as f64 - 1.0)).min(to);
        let nodes = (((hi - lo) / spacing).ceil() as usize | 1).max(5);
        acc.add(gamma_part(table, kernel, n, lo, hi, nodes));
        lo = hi;
    }
    2.0 * acc.value()
}

/// Fourier-inversion sanity probe: the integral of Psi over [-cutoff,
/// cutoff] approaches psi(0) = 1 as the cutoff grows (this is the
/// integral route with S replaced by the constant 1 and N = 0).
pub fn kernel_inversion_probe(kernel: &SmoothingKernel, cutoff: f64, nodes: usize) -> f64 {
    let nodes = (nodes | 1).max(5);
    let h = 2.0 * cutoff / (nodes as f64 - 1.0);
    let mut acc = CompensatedSum::new();
    for i in 0..nodes {
        let alpha = -cutoff + h * i as f64;
        let w = if i == 0 || i == nodes - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * kernel.psi_fourier(alpha));
    }
    acc.value() * h / 3.0
}

/// One row of the scaling trend table.
#[derive(Debug, Clone, Copy)]
pub struct ProbeRow {
    pub m: u32,
    pub x: f64,
    pub epsilon: f64,
    pub witness_count: u64,
    pub gamma_sharp: f64,
    /// epsilon * X^(3-c), the predicted growth scale.
    pub theta_prediction: f64,
    pub ratio: f64,
}

/// Run the search across a list of window indices and report the measured
/// count against the predicted scale.
pub fn scaling_probe(
    c: f64,
    theta: f64,
    m_list: &[u32],
    sieve_budget: &SieveBudget,
    pair_budget: &PairBudget,
) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let config = ProblemConfig::new(c, theta, Target::WindowIndex(m));
        let scales = derive_scales(&config)?;
        let ctx = PhaseContext::new(&config, &scales);
        let table = PrimeTable::for_window(&ctx, sieve_budget)?;
        let kernel = SmoothingKernel::new(scales.epsilon, scales.x.ln().ceil() as u32)?;
        let counts = gamma_counts(&table, &kernel, scales.n_induced, scales.epsilon, pair_budget)?;
        let theta_prediction = scales.epsilon * scales.x.powf(3.0 - c);
        rows.push(ProbeRow {
            m,
            x: scales.x,
            epsilon: scales.epsilon,
            witness_count: counts.witness_count,
            gamma_sharp: counts.gamma_sharp,
            theta_prediction,
            ratio: counts.gamma_sharp / theta_prediction,
        });
    }
    Ok(rows)
}

/// Full per-run report: configuration echo, counts, and the Fourier-side
/// split when it was computed.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub c: f64,
    pub theta: f64,
    pub scales: DerivedScales,
    pub kernel_k: u32,
    pub sharp_eps: f64,
    pub counts: GammaCounts,
    pub integral: Option<GammaIntegral>,
    pub theta_prediction: f64,
}

impl SearchReport {
    pub fn assemble(
        config: &ProblemConfig,
        scales: &DerivedScales,
        kernel: &SmoothingKernel,
        sharp_eps: f64,
        counts: GammaCounts,
        integral: Option<GammaIntegral>,
    ) -> Self {
        Self {
            c: config.c,
            theta: config.theta,
            scales: *scales,
            kernel_k: kernel.k,
            sharp_eps,
            counts,
            integral,
            theta_prediction: scales.epsilon * scales.x.powf(3.0 - config.c),
        }
    }
}
