//! The one-shot verification battery: ten numbered criteria covering the
//! scale system, phase function, kernel envelope, search equivalence,
//! witness existence, the Fourier-side count, major-arc deviations,
//! mean-square ratios, the integer-sum envelope, and determinism.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tanprime_core::expsum::{
    integer_sum_bound_shape, mean_square_s_major, mean_square_s_unit, MeanSquareOpts,
};
use tanprime_core::search::GammaQuadOpts;
use tanprime_core::{
    brute_force_search, derive_scales, gamma0_via_integral, gamma_counts, integer_exp_sum,
    major_arc_deviation, prime_exp_sum, report, search_meet_in_middle, window_geometry,
    IntegerSumBudget, OscillationBudget, PairBudget, PhaseContext, PrimeTable, ProblemConfig,
    SieveBudget, SmoothingKernel, Target,
};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {} {}: {} ({:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatteryMode {
    Full,
    Quick,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// Frozen 50-digit evaluation of the defining formulas at
// (c, theta, m) = (1.05, 2, 2).
const X_M2: f64 = 1430.7857250397797048;
const EPS_M2: f64 = 0.65515222325136469573;
const TAU_M2: f64 = 0.0010895974329070946701;
const H_M2: f64 = 1.5589804530434601696;
const DELTA1_M2: f64 = 813.55182981714861115;
const DELTA2_M2: f64 = 1620.2472255929714233;
const N_M2: f64 = 13888.556224601814071;

fn base_config(m: u32) -> ProblemConfig {
    ProblemConfig::new(1.05, 2.0, Target::WindowIndex(m))
}

fn window(c: f64, m: u32) -> (ProblemConfig, tanprime_core::DerivedScales, PhaseContext, PrimeTable)
{
    let config = ProblemConfig::new(c, 2.0, Target::WindowIndex(m));
    let scales = derive_scales(&config).expect("scales");
    let ctx = PhaseContext::new(&config, &scales);
    let table = PrimeTable::for_window(&ctx, &SieveBudget::default()).expect("sieve");
    (config, scales, ctx, table)
}

/// C1: derived scales against the frozen high-precision evaluation, and
/// the interior-window ordering chain for three tangent powers.
pub fn criterion_1_scales() -> CriterionResult {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut detail = String::new();

    let config = base_config(2);
    match derive_scales(&config) {
        Ok(s) => {
            for (got, want) in [
                (s.x, X_M2),
                (s.epsilon, EPS_M2),
                (s.tau, TAU_M2),
                (s.h, H_M2),
                (s.delta1, DELTA1_M2),
                (s.delta2, DELTA2_M2),
                (s.n_induced, N_M2),
            ] {
                worst = worst.max(rel(got, want));
            }
            ok &= worst < 1e-12;
            let _ = write!(detail, "max rel dev {worst:.2e} (tol 1e-12)");
            for theta in [1.5, 2.0, 3.0] {
                let cfg = ProblemConfig::new(1.05, theta, Target::WindowIndex(2));
                let sc = derive_scales(&cfg).expect("scales");
                match window_geometry(&cfg, &sc) {
                    Ok(g) => {
                        ok &= 1.5 < g.lambda_lo
                            && g.lambda_lo < g.lambda
                            && g.lambda < g.mu
                            && g.mu < g.lambda_hi
                            && g.lambda_hi < 2.0;
                    }
                    Err(e) => {
                        ok = false;
                        let _ = write!(detail, "; chain failed at theta={theta}: {e}");
                    }
                }
            }
            let _ = write!(detail, "; chain holds for theta in {{1.5, 2, 3}}");
        }
        Err(e) => {
            ok = false;
            detail = format!("derive failed: {e}");
        }
    }
    CriterionResult {
        id: "C1",
        name: "scale system vs high-precision oracle",
        passed: ok,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// C2: phase derivatives against finite differences, the anchor identity
/// N = 3 f(X), and the inverse round trip.
pub fn criterion_2_phase() -> CriterionResult {
    let start = Instant::now();
    let config = base_config(2);
    let scales = derive_scales(&config).expect("scales");
    let ctx = PhaseContext::new(&config, &scales);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc2);
    let mut worst_d1 = 0.0f64;
    let mut worst_d2 = 0.0f64;
    let mut worst_inv = 0.0f64;
    for _ in 0..100 {
        let t = rng.gen_range(0.02..0.98);
        let y = scales.delta1 * (scales.delta2 / scales.delta1).powf(t);
        let h = y * 1e-6;
        let fd1 = (ctx.value(y + h).unwrap() - ctx.value(y - h).unwrap()) / (2.0 * h);
        worst_d1 = worst_d1.max(rel(ctx.derivative(y).unwrap(), fd1));
        let h2 = y * 1e-5;
        let fd2 = (ctx.value(y + h2).unwrap() - 2.0 * ctx.value(y).unwrap()
            + ctx.value(y - h2).unwrap())
            / (h2 * h2);
        worst_d2 = worst_d2.max(rel(ctx.second_derivative(y).unwrap(), fd2));
        let f = ctx.value(y).unwrap();
        worst_inv = worst_inv.max(rel(ctx.invert(f).unwrap(), y));
    }
    let anchor = rel(scales.n_induced, 3.0 * ctx.value(scales.x).unwrap());
    let passed = worst_d1 < 1e-6 && worst_d2 < 1e-4 && anchor < 1e-12 && worst_inv < 1e-10;
    CriterionResult {
        id: "C2",
        name: "phase derivatives, anchor identity, inverse",
        passed,
        detail: format!(
            "f' dev {worst_d1:.2e} (1e-6), f'' dev {worst_d2:.2e} (1e-4), N=3f(X) dev {anchor:.2e} (1e-12), invert dev {worst_inv:.2e} (1e-10)"
        ),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Independent quadrature route to the kernel Fourier transform: exact
/// plateau piece plus Gauss-Legendre on knot-aligned sub-panels.
pub fn kernel_fourier_by_quadrature(kernel: &SmoothingKernel, x: f64) -> f64 {
    use std::f64::consts::PI;
    const GL16_X: [f64; 8] = [
        0.09501250983763744,
        0.28160355077925891,
        0.45801677765722739,
        0.61787624440264375,
        0.75540440835500303,
        0.86563120238783174,
        0.94457502307323258,
        0.98940093499164993,
    ];
    const GL16_W: [f64; 8] = [
        0.18945061045506850,
        0.18260341504492359,
        0.16915651939500254,
        0.14959598881657673,
        0.12462897125553387,
        0.09515851168249278,
        0.06225352393864789,
        0.02715245941175409,
    ];
    let eps = kernel.epsilon;
    let plateau = 0.75 * eps;
    let w = 2.0 * PI * x;
    let plateau_part = if w == 0.0 {
        plateau
    } else {
        (w * plateau).sin() / w
    };
    let mut trans = 0.0;
    let pieces = kernel.k as usize + 1;
    for p in 0..pieces {
        let lo = plateau + (eps - plateau) * p as f64 / pieces as f64;
        let hi = plateau + (eps - plateau) * (p + 1) as f64 / pieces as f64;
        let revs = (x.abs() * (hi - lo)).max(1e-12);
        let sub = (2.0 * revs).ceil() as usize + 1;
        for q in 0..sub {
            let a = lo + (hi - lo) * q as f64 / sub as f64;
            let b = lo + (hi - lo) * (q + 1) as f64 / sub as f64;
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for j in 0..8 {
                for sign in [-1.0, 1.0] {
                    let y = mid + sign * half * GL16_X[j];
                    trans += GL16_W[j] * half * kernel.psi(y) * (w * y).cos();
                }
            }
        }
    }
    2.0 * (plateau_part + trans)
}

/// C3: the three-branch envelope dominates |Psi| on a wide log grid for
/// k in {1, 2, 5, 20}; Psi(0) = 7 eps / 4; quadrature agrees with the
/// closed form at three spot frequencies.
pub fn criterion_3_kernel() -> CriterionResult {
    let start = Instant::now();
    let eps = EPS_M2;
    let mut ok = true;
    let mut violations = 0u32;
    let mut mass_dev = 0.0f64;
    let mut quad_dev = 0.0f64;
    for k in [1u32, 2, 5, 20] {
        let kernel = SmoothingKernel::new(eps, k).expect("kernel");
        let lo = (1e-3 / eps).ln();
        let hi = (1e6 / eps).ln();
        for i in 0..10_000 {
            let x = (lo + (hi - lo) * i as f64 / 9_999.0).exp();
            if kernel.psi_fourier(x).abs() > kernel.fourier_bound(x) {
                violations += 1;
            }
        }
        mass_dev = mass_dev.max(rel(kernel.psi_fourier(0.0), 1.75 * eps));
        for scale in [0.1, 1.0, 10.0] {
            let x = scale / eps;
            quad_dev = quad_dev
                .max((kernel_fourier_by_quadrature(&kernel, x) - kernel.psi_fourier(x)).abs());
        }
    }
    ok &= violations == 0 && mass_dev < 1e-12 && quad_dev < 1e-8;
    CriterionResult {
        id: "C3",
        name: "kernel envelope and Fourier closed form",
        passed: ok,
        detail: format!(
            "envelope violations {violations}/40000, mass dev {mass_dev:.2e} (1e-12), quadrature dev {quad_dev:.2e} (1e-8)"
        ),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// C4: the narrowed pair search equals the cubic reference exactly on
/// randomized sub-window cases.
pub fn criterion_4_search_equivalence(cases: usize) -> CriterionResult {
    let start = Instant::now();
    let (_, scales, _, table) = window(1.05, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc4);
    let budget = PairBudget::default();
    let mut ran = 0usize;
    let mut mismatches = 0usize;
    while ran < cases {
        let span = rng.gen_range(1200.0..4200.0);
        let lo = rng.gen_range(scales.delta1..scales.delta2 - span);
        let sub = table.slice_by_value(lo, lo + span);
        if sub.is_empty() || sub.len() > 500 {
            continue;
        }
        let f = sub.phase_values();
        let mid = f[f.len() / 2];
        let n = 3.0 * mid * rng.gen_range(0.95..1.05);
        let eps = rng.gen_range(0.02..1.8);
        let brute = brute_force_search(&sub, n, eps).expect("brute");
        let mim = search_meet_in_middle(&sub, n, eps, usize::MAX, &budget).expect("mim");
        if brute != mim.witnesses {
            mismatches += 1;
        }
        ran += 1;
    }
    CriterionResult {
        id: "C4",
        name: "search route equivalence",
        passed: mismatches == 0,
        detail: format!("{ran} randomized cases, {mismatches} mismatches"),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// C5: witness existence at (c, theta) = (1.01, 2) across windows.
pub fn criterion_5_witness_existence(m_list: &[u32]) -> CriterionResult {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for &m in m_list {
        let (_, scales, _, table) = window(1.01, m);
        let kernel = SmoothingKernel::new(scales.epsilon, scales.x.ln().ceil() as u32)
            .expect("kernel");
        let counts = gamma_counts(
            &table,
            &kernel,
            scales.n_induced,
            scales.epsilon,
            &PairBudget::default(),
        )
        .expect("counts");
        let sample = search_meet_in_middle(
            &table,
            scales.n_induced,
            scales.epsilon,
            1,
            &PairBudget::default(),
        )
        .expect("search");
        let found = counts.witness_count >= 1
            && counts.gamma_sharp > 0.0
            && sample
                .witnesses
                .first()
                .map(|t| t.residual.abs() < scales.epsilon)
                .unwrap_or(false);
        ok &= found;
        let _ = write!(
            detail,
            "m={m}: {} witnesses, gamma {:.3e}; ",
            counts.witness_count, counts.gamma_sharp
        );
    }
    CriterionResult {
        id: "C5",
        name: "witness existence at c=1.01",
        passed: ok,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// C6: Fourier-side count against the direct count at m=2, with the
/// analytic tail bound computed for k = ceil(log X).
///
/// The second clause (tail bound below 1) is asymptotic-only: at desk
/// scale the envelope's k-th power branch has not begun to decay at the
/// cutoff H, and the bound evaluates to ~1e15. The criterion is asserted
/// as stated and the measured numbers are reported.
pub fn criterion_6_parseval() -> CriterionResult {
    let start = Instant::now();
    let (_, scales, _, table) = window(1.05, 2);
    let k = scales.x.ln().ceil() as u32;
    let kernel = SmoothingKernel::new(scales.epsilon, k).expect("kernel");
    let counts = gamma_counts(
        &table,
        &kernel,
        scales.n_induced,
        scales.epsilon,
        &PairBudget::default(),
    )
    .expect("counts");
    let integral = gamma0_via_integral(
        &table,
        &kernel,
        &scales,
        scales.n_induced,
        &GammaQuadOpts::default(),
    )
    .expect("integral");
    let gap = (integral.total - counts.gamma0_direct).abs();
    let within_contract = gap <= 0.01 * counts.gamma0_direct + integral.gamma3_bound;
    let tail_below_one = integral.gamma3_bound < 1.0;
    CriterionResult {
        id: "C6",
        name: "smoothed count vs Fourier integral",
        passed: within_contract && tail_below_one,
        detail: format!(
            "direct {:.6e}, gamma1+gamma2 {:.6e}, rel gap {:.2e}, gamma3_bound {:.3e} (required < 1, k={k}); contract {}",
            counts.gamma0_direct,
            integral.total,
            gap / counts.gamma0_direct,
            integral.gamma3_bound,
            if within_contract { "holds" } else { "violated" }
        ),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// C7: major-arc deviation trend across windows, and the alpha = 0
/// deviation at prime-number-theorem level for m >= 3.
pub fn criterion_7_deviation_trend(m_hi: u32) -> CriterionResult {
    let start = Instant::now();
    let budget = OscillationBudget::default();
    let mut ok = true;
    let mut prev: Option<f64> = None;
    let mut detail = String::new();
    for m in 2..=m_hi {
        let (_, scales, ctx, table) = window(1.05, m);
        let samples = major_arc_deviation(&table, &scales, &ctx, 65, &budget).expect("grid");
        let max = samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
        let at_zero = samples[32].deviation;
        if let Some(p) = prev {
            ok &= max <= 1.2 * p;
        }
        if m >= 3 {
            ok &= at_zero < 0.05;
        }
        let _ = write!(detail, "m={m}: max {max:.3e}, at0 {at_zero:.3e}; ");
        prev = Some(max);
    }
    CriterionResult {
        id: "C7",
        name: "major-arc deviation trend",
        passed: ok,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// C8: mean-square ratios against the X^(2-c) log^3 X and X log^3 X
/// normalizations: bounded by 100 and inside a single order-of-magnitude
/// band across m = 2..5.
///
/// The major-arc family is expected to breach the stability band
/// slightly (measured span ~11.5x): the log^3 X factor in the
/// normalization is bound slack, not sharp scaling, so the normalized
/// ratio drifts like 1/log^3 X. The criterion is asserted as stated; the
/// X^(2-c)-normalized span, which is flat to a few percent, is reported
/// alongside.
pub fn criterion_8_mean_square_ratios(m_hi: u32) -> CriterionResult {
    let start = Instant::now();
    let mut ratios_major: Vec<f64> = Vec::new();
    let mut ratios_unit: Vec<f64> = Vec::new();
    let mut plain_major: Vec<f64> = Vec::new();
    for m in 2..=m_hi {
        let (_, scales, _, table) = window(1.05, m);
        let logx3 = scales.x.ln().powi(3);
        let opts = MeanSquareOpts {
            initial_nodes: 1025,
            max_nodes: 1 << 15,
            rel_agree: 0.01,
        };
        let ms = mean_square_s_major(&table, &scales, &opts);
        ratios_major.push(ms.value / (scales.x.powf(2.0 - 1.05) * logx3));
        plain_major.push(ms.value / scales.x.powf(2.0 - 1.05));
        let unit_opts = MeanSquareOpts {
            initial_nodes: 1025,
            max_nodes: if m <= 3 { 1 << 18 } else { 1 << 12 },
            rel_agree: 0.01,
        };
        let n_pick = (1.0 / scales.epsilon).floor() as u32;
        let mut seen = Vec::new();
        for n in [0u32, 1, n_pick] {
            if seen.contains(&n) {
                continue;
            }
            seen.push(n);
            let msu = mean_square_s_unit(&table, n, &unit_opts);
            ratios_unit.push(msu.value / (scales.x * logx3));
        }
    }
    let spread = |v: &[f64]| {
        let max = v.iter().cloned().fold(0.0f64, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        (max, min, max / min)
    };
    let (max1, _, span1) = spread(&ratios_major);
    let (max3, _, span3) = spread(&ratios_unit);
    let (_, _, plain_span) = spread(&plain_major);
    let passed = max1 <= 100.0 && max3 <= 100.0 && span1 <= 10.0 && span3 <= 10.0;
    CriterionResult {
        id: "C8",
        name: "mean-square ratio bounds and stability",
        passed,
        detail: format!(
            "major: max {max1:.3e}, span {span1:.2}x (<=10); unit: max {max3:.3e}, span {span3:.2}x (<=10); major span without log^3 {plain_span:.3}x"
        ),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// C9: the integer exponential sum sits under ten times the
/// first-derivative envelope shape on a log grid of frequencies.
pub fn criterion_9_integer_sum_bound() -> CriterionResult {
    let start = Instant::now();
    let (_, scales, ctx, _) = window(1.05, 2);
    let budget = IntegerSumBudget::default();
    let lo = scales.x.powf(-1.05);
    let hi = scales.h;
    let mut worst = 0.0f64;
    for i in 0..64 {
        let t = lo * (hi / lo).powf(i as f64 / 63.0);
        let a = integer_exp_sum(&ctx, t, &budget).expect("A(t)").norm();
        let bound = integer_sum_bound_shape(scales.x, 1.05, t);
        worst = worst.max(a / bound);
    }
    CriterionResult {
        id: "C9",
        name: "integer-sum envelope shape",
        passed: worst <= 10.0,
        detail: format!("max |A|/bound {worst:.3} (<= 10) on 64-point log grid"),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// A small end-to-end pipeline whose serialized outputs C10 compares
/// across runs and thread counts.
pub fn determinism_pipeline() -> String {
    let config = base_config(2);
    let scales = derive_scales(&config).expect("scales");
    let ctx = PhaseContext::new(&config, &scales);
    let table = PrimeTable::for_window(&ctx, &SieveBudget::default()).expect("sieve");
    let mut out = String::new();
    out.push_str(&report::scales_json(&scales));
    out.push('\n');
    let mut csv = Vec::new();
    report::write_prime_csv(&mut csv, &table).expect("csv");
    out.push_str(std::str::from_utf8(&csv).unwrap());
    let samples = major_arc_deviation(&table, &scales, &ctx, 33, &OscillationBudget::default())
        .expect("grid");
    let mut csv = Vec::new();
    report::write_alpha_csv(&mut csv, &samples).expect("csv");
    out.push_str(std::str::from_utf8(&csv).unwrap());
    let kernel = SmoothingKernel::new(scales.epsilon, 8).expect("kernel");
    let counts = gamma_counts(
        &table,
        &kernel,
        scales.n_induced,
        scales.epsilon,
        &PairBudget::default(),
    )
    .expect("counts");
    let _ = write!(
        out,
        "{} {} {}\n",
        counts.witness_count,
        report::fmt_f64(counts.gamma_sharp),
        report::fmt_f64(counts.gamma0_direct)
    );
    let s = prime_exp_sum(&table, scales.tau);
    let _ = write!(out, "{} {}\n", report::fmt_f64(s.re), report::fmt_f64(s.im));
    out
}

/// C10: byte-identical serialized outputs across repeated runs and
/// across thread-pool sizes 1 and 4.
pub fn criterion_10_determinism() -> CriterionResult {
    let start = Instant::now();
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool");
    let pool4 = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .expect("pool");
    let a = pool1.install(determinism_pipeline);
    let b = pool4.install(determinism_pipeline);
    let c = pool4.install(determinism_pipeline);
    let passed = a == b && b == c;
    CriterionResult {
        id: "C10",
        name: "byte-identical outputs across runs and thread counts",
        passed,
        detail: format!(
            "{} bytes, threads {{1,4}} {}",
            a.len(),
            if passed { "identical" } else { "DIFFER" }
        ),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Run the battery. Quick mode trims the heavy windows (m <= 3) and the
/// randomized case count so the sweep finishes within a minute.
pub fn run_battery(mode: BatteryMode) -> Vec<CriterionResult> {
    let quick = mode == BatteryMode::Quick;
    let mut results = vec![
        criterion_1_scales(),
        criterion_2_phase(),
        criterion_3_kernel(),
        criterion_4_search_equivalence(if quick { 15 } else { 50 }),
        criterion_5_witness_existence(if quick { &[2, 3] } else { &[2, 3, 4] }),
        criterion_6_parseval(),
    ];
    results.push(criterion_7_deviation_trend(if quick { 3 } else { 5 }));
    results.push(criterion_8_mean_square_ratios(if quick { 3 } else { 5 }));
    results.push(criterion_9_integer_sum_bound());
    results.push(criterion_10_determinism());
    results
}
