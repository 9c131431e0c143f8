//! Report serialization: JSON documents and CSV tables with a fixed field
//! order and floats printed to 17 significant digits, so identical runs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::expsum::AlphaSample;
use crate::primes::PrimeTable;
use crate::scales::{DerivedScales, WindowGeometry};
use crate::search::{ProbeRow, SearchReport, WitnessTriple};

/// 17 significant digits round-trips every f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_f64(v),
        None => "null".to_string(),
    }
}

/// DerivedScales as a JSON document with the agreed field names.
pub fn scales_json(s: &DerivedScales) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"m\": {}, \"X\": {}, \"epsilon\": {}, \"tau\": {}, \"H\": {}, \"delta1\": {}, \"delta2\": {}, \"N_induced\": {}, \"N_requested\": {}, \"N_mismatch_rel\": {}}}",
        s.m,
        fmt_f64(s.x),
        fmt_f64(s.epsilon),
        fmt_f64(s.tau),
        fmt_f64(s.h),
        fmt_f64(s.delta1),
        fmt_f64(s.delta2),
        fmt_f64(s.n_induced),
        fmt_opt(s.n_requested),
        fmt_opt(s.n_mismatch_rel),
    );
    out
}

pub fn geometry_json(g: &WindowGeometry) -> String {
    format!(
        "{{\"lambda_lo\": {}, \"lambda_hi\": {}, \"lambda\": {}, \"mu\": {}, \"delta_lambda\": {}, \"delta_mu\": {}}}",
        fmt_f64(g.lambda_lo),
        fmt_f64(g.lambda_hi),
        fmt_f64(g.lambda),
        fmt_f64(g.mu),
        fmt_f64(g.delta_lambda),
        fmt_f64(g.delta_mu),
    )
}

/// Prime table dump: prime, log_weight, phase_value at 18 significant
/// digits. Tables without phases print an empty phase column.
pub fn write_prime_csv<W: Write>(w: &mut W, table: &PrimeTable) -> io::Result<()> {
    writeln!(w, "prime,log_weight,phase_value")?;
    let phases = table.phase_values();
    for (i, &p) in table.primes().iter().enumerate() {
        if phases.is_empty() {
            writeln!(w, "{},{:.17e},", p, table.log_weights()[i])?;
        } else {
            writeln!(w, "{},{:.17e},{:.17e}", p, table.log_weights()[i], phases[i])?;
        }
    }
    Ok(())
}

/// Major-arc sample dump: alpha, Re S, Im S, Re I, Im I, deviation.
pub fn write_alpha_csv<W: Write>(w: &mut W, samples: &[AlphaSample]) -> io::Result<()> {
    writeln!(w, "alpha,re_s,im_s,re_i,im_i,deviation")?;
    for s in samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.alpha, s.s_value.re, s.s_value.im, s.i_value.re, s.i_value.im, s.deviation
        )?;
    }
    Ok(())
}

/// Kernel sweep dumps: (y, psi) rows and (x, Psi, bound) rows.
pub fn write_kernel_psi_csv<W: Write>(w: &mut W, rows: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "y,psi")?;
    for (y, v) in rows {
        writeln!(w, "{y:.16e},{v:.16e}")?;
    }
    Ok(())
}

pub fn write_kernel_fourier_csv<W: Write>(w: &mut W, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    writeln!(w, "x,psi_fourier,bound")?;
    for (x, v, b) in rows {
        writeln!(w, "{x:.16e},{v:.16e},{b:.16e}")?;
    }
    Ok(())
}

/// Integer-sum sweep: t, |A(t)|, bound shape.
pub fn write_amplitude_csv<W: Write>(w: &mut W, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    writeln!(w, "t,abs_a,bound")?;
    for (t, a, b) in rows {
        writeln!(w, "{t:.16e},{a:.16e},{b:.16e}")?;
    }
    Ok(())
}

/// Scaling trend table.
pub fn write_probe_csv<W: Write>(w: &mut W, rows: &[ProbeRow]) -> io::Result<()> {
    writeln!(w, "m,X,epsilon,witness_count,gamma_sharp,theta_prediction,ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}",
            r.m, r.x, r.epsilon, r.witness_count, r.gamma_sharp, r.theta_prediction, r.ratio
        )?;
    }
    Ok(())
}

/// Witness store: one JSON record per line.
pub fn write_witness_jsonl<W: Write>(w: &mut W, witnesses: &[WitnessTriple]) -> io::Result<()> {
    for t in witnesses {
        writeln!(
            w,
            "{{\"p1\": {}, \"p2\": {}, \"p3\": {}, \"value\": {}, \"residual\": {}, \"weight\": {}}}",
            t.p1,
            t.p2,
            t.p3,
            fmt_f64(t.value),
            fmt_f64(t.residual),
            fmt_f64(t.weight)
        )?;
    }
    Ok(())
}

/// The one-document search report.
pub fn search_report_json(r: &SearchReport) -> String {
    let integral = match &r.integral {
        Some(g) => format!(
            "{{\"gamma1\": {}, \"gamma2\": {}, \"gamma3_bound\": {}, \"total\": {}, \"nodes\": {}, \"refinements\": {}, \"converged\": {}}}",
            fmt_f64(g.gamma1),
            fmt_f64(g.gamma2),
            fmt_f64(g.gamma3_bound),
            fmt_f64(g.total),
            g.nodes,
            g.refinements,
            g.converged
        ),
        None => "null".to_string(),
    };
    format!(
        "{{\"c\": {}, \"theta\": {}, \"scales\": {}, \"kernel_k\": {}, \"sharp_eps\": {}, \"witness_count\": {}, \"gamma_sharp\": {}, \"gamma0_direct\": {}, \"gamma0_integral\": {}, \"theta_prediction\": {}}}",
        fmt_f64(r.c),
        fmt_f64(r.theta),
        scales_json(&r.scales),
        r.kernel_k,
        fmt_f64(r.sharp_eps),
        r.counts.witness_count,
        fmt_f64(r.counts.gamma_sharp),
        fmt_f64(r.counts.gamma0_direct),
        integral,
        fmt_f64(r.theta_prediction),
    )
}
