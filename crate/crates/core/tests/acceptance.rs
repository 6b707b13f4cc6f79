//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

mod common;

use std::path::Path;
use std::time::Instant;

use common::*;
use scatterlab_core::analysis::audit::{inequality_audit, AuditInputs, DEFAULT_LATE_TIME};
use scatterlab_core::analysis::decay::{
    exterior_envelope, fit_energy_decay, fit_pointwise_decay, DecayRegion, DEFAULT_WINDOW,
};
use scatterlab_core::analysis::sobolev::{sobolev_norms, sobolev_refinement, Bump, BumpFamily};
use scatterlab_core::energy::energy_breakdown;
use scatterlab_core::evolve::{evolve_forward, extract_radiation, restrict_to_cauchy, evolve_goursat};
use scatterlab_core::fields::diagonal_nodes;
use scatterlab_core::io;
use scatterlab_core::scattering::{lipschitz_sweep, roundtrip_residual, scattering_report};
use scatterlab_core::{diamond_backward, CellCoefficients, GaussianPulse, GridField, PulseKind};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// 1. Flat transport on a 512² lattice matches d'Alembert to 1e-12.
fn flat_exactness() -> Outcome {
    let start = Instant::now();
    let grid = flat_grid(512, EXTENT);
    let pulse = GaussianPulse::new(1.0, 10.0, 2.0, PulseKind::TimeSymmetric).unwrap();
    let (lo, hi) = grid.cauchy_range();
    // samples at h/4 so the seed's half-step differences land on samples
    let m = 4 * grid.n();
    let xs: Vec<f64> = (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).collect();
    let data = pulse.sample(&xs, *grid.mode()).unwrap();
    let field = evolve_forward(&data, &grid).unwrap();
    let mut err: f64 = 0.0;
    for i in 0..=grid.n() {
        for j in 0..=grid.n() {
            if let Some(x) = field.get(i, j) {
                let exact = 0.5 * (pulse.psi0(-grid.u(i)) + pulse.psi0(grid.v(j)));
                err = err.max((x - exact).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        err <= 1e-12 && secs < 5.0,
        format!("max error {err:.3e} (<= 1e-12), runtime {secs:.2} s (< 5 s)"),
    )
}

fn closure_max(n: usize) -> (f64, f64) {
    let start = Instant::now();
    let (_, field) = fixture_field(n, 1.0);
    let times: Vec<f64> = (1..=8).map(|k| 10.0 * k as f64).collect();
    let b = energy_breakdown(&field, &times).unwrap();
    let worst = b.series.iter().map(|c| c.residual()).fold(0.0, f64::max);
    (worst, start.elapsed().as_secs_f64())
}

/// 2. Energy identity closes to 2% at n = 1024, three times better at 2048.
fn energy_identity() -> Outcome {
    let (r1, s1) = closure_max(1024);
    let (r2, s2) = closure_max(2048);
    let factor = r1 / r2;
    outcome(
        r1 <= 0.02 && factor >= 3.0 && s1 < 120.0 && s2 < 120.0,
        format!(
            "max residual over T in [10, 80]: {r1:.3e} at n=1024, {r2:.3e} at n=2048, factor {factor:.2} (>= 3), runtimes {s1:.2} s / {s2:.2} s"
        ),
    )
}

/// Recover the forward field on anti-diagonals `n..top` by backward steps
/// from the two diagonals `top`, `top + 1` and the truncation edges.
/// Below `n` the bands come from the Taylor seed, not from the stencil.
fn backward_recovery(field: &GridField, top: usize) -> f64 {
    let grid = field.grid();
    let n = grid.n();
    let h = grid.h();
    let mut back = field.clone();
    for k in (n..top).rev() {
        for (a, b) in diagonal_nodes(n, k) {
            if a == n || b == n {
                continue;
            }
            let c = CellCoefficients::from(grid.geometry(a, b));
            let value = diamond_backward(back.value(a + 1, b + 1), back.value(a, b + 1), back.value(a + 1, b), &c, h);
            back.set(a, b, value);
        }
    }
    let mut err: f64 = 0.0;
    for k in n..top {
        for (a, b) in diagonal_nodes(n, k) {
            err = err.max((back.value(a, b) - field.value(a, b)).abs());
        }
    }
    err / field.max_abs()
}

/// 3. Goursat inversion recovers the data; the scheme is reversible.
fn goursat_roundtrip() -> Outcome {
    let res = |n| {
        let grid = fixture_grid(n);
        roundtrip_residual(&fixture_data(&grid, 1.0), &grid).unwrap()
    };
    let (r1, r2) = (res(1024), res(2048));
    let factor = r1 / r2;
    let (_, field) = fixture_field(512, 1.0);
    let rev = backward_recovery(&field, 512 + 384);
    outcome(
        r1 <= 0.02 && factor >= 3.0 && rev <= 1e-10,
        format!(
            "roundtrip residual {r1:.3e} at n=1024, {r2:.3e} at n=2048, factor {factor:.2} (>= 3); interior reversibility {rev:.3e} (<= 1e-10)"
        ),
    )
}

/// 4. Two-sided inequalities on the amplitude sweep.
fn two_sided_estimates() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for amp in [0.25, 0.5, 1.0, 2.0, 3.0] {
        let (_, field) = fixture_field(1024, amp);
        let inputs = AuditInputs::from_field(&field, DEFAULT_LATE_TIME).unwrap();
        for row in inequality_audit(&inputs).unwrap() {
            let scale = row.rhs.abs().max(row.lhs.abs()).max(f64::MIN_POSITIVE);
            worst = worst.min(row.margin / scale);
            if !row.pass {
                failures.push(format!("A={amp} {}", row.id.name()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 audited inequalities, smallest relative margin {worst:.3e}{}",
            if failures.is_empty() { String::new() } else { format!(", failing: {failures:?}") }
        ),
    )
}

/// 5. Energy through `𝒮_τ` decays at least like `τ^{-1}`.
fn energy_decay() -> Outcome {
    let (_, field) = fixture_field(1024, 1.0);
    let times: Vec<f64> = (20..=80).map(f64::from).collect();
    let b = energy_breakdown(&field, &times).unwrap();
    let series: Vec<(f64, f64)> = b.series.iter().map(|c| (c.t, c.slice.total)).collect();
    let fit = fit_energy_decay(&series, DEFAULT_WINDOW).unwrap();
    outcome(
        fit.slope <= -1.0 && fit.r2 >= 0.9,
        format!("slope {:.3} (<= -1), r2 {:.3} (>= 0.9)", fit.slope, fit.r2),
    )
}

/// 6. Pointwise envelopes near the horizon and far out.
fn pointwise_decay() -> Outcome {
    let (_, field) = fixture_field(1024, 1.0);
    let near = fit_pointwise_decay(&field, DecayRegion::NearHorizon, DEFAULT_WINDOW).unwrap();
    let env = exterior_envelope(&field, DEFAULT_WINDOW, 1.0).unwrap();
    let peaks: Vec<String> = env.peaks.iter().map(|(u, y)| format!("{y:.2e}@u={u:.0}")).collect();
    outcome(
        near.slope <= -0.5 && env.non_increasing,
        format!(
            "near-horizon slope {:.3} (<= -0.5, r2 {:.3}); exterior peaks {} non-increasing: {}",
            near.slope,
            near.r2,
            peaks.join(" "),
            env.non_increasing
        ),
    )
}

/// 7. Sobolev ratio stable under refinement; exact homogeneity.
fn sobolev_probe() -> Outcome {
    let fam = BumpFamily::default();
    let bumps = fam.draw(100, 2024);
    let refine = sobolev_refinement(&bumps, fam.length, 2000).unwrap();
    let change = refine.relative_change();
    let xs: Vec<f64> = (0..=4000).map(|k| fam.length * k as f64 / 4000.0).collect();
    let bump = Bump {
        amplitude: 0.9,
        center: 17.0,
        width: 5.0,
    };
    let phi = bump.sample(&xs);
    let doubled: Vec<f64> = phi.iter().map(|p| 2.0 * p).collect();
    let (a, b) = (sobolev_norms(&xs, &phi).unwrap(), sobolev_norms(&xs, &doubled).unwrap());
    let exact = b.raw_ratio() == 16.0 * a.raw_ratio() && b.h1_sq == 4.0 * a.h1_sq;
    outcome(
        change <= 0.05 && refine.fine.is_finite() && exact,
        format!(
            "max ratio {:.6e} -> {:.6e}, change {change:.2e} (<= 5%); k=2 scaling exact: {exact}",
            refine.coarse, refine.fine
        ),
    )
}

/// 8. Lipschitz ratios finite; linear limit independent of amplitude.
fn lipschitz() -> Outcome {
    let grid = fixture_grid(1024);
    let range = grid.cauchy_range();
    let sweep = |amp: f64| {
        let data = fixture_data(&grid, amp);
        lipschitz_sweep(&data, &grid, 1e-3 * amp, 20, 17, range).unwrap()
    };
    let tiny = [sweep(1e-6), sweep(1e-5)];
    let gap = (tiny[0].max_ratio - tiny[1].max_ratio).abs() / tiny[1].max_ratio;
    let large = [sweep(0.5), sweep(1.0)];
    let finite = tiny
        .iter()
        .chain(&large)
        .all(|s| s.ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    outcome(
        finite && gap <= 0.01,
        format!(
            "linear limit {:.6} vs {:.6} (gap {gap:.2e} <= 1%); max ratio {:.4} at ball radius {:.4}, {:.4} at {:.4}; all finite: {finite}",
            tiny[0].max_ratio, tiny[1].max_ratio, large[0].max_ratio, large[0].ball_radius, large[1].max_ratio,
            large[1].ball_radius
        ),
    )
}

fn write_artifacts(dir: &Path) {
    let grid = fixture_grid(512);
    let data = fixture_data(&grid, 1.0);
    let field = evolve_forward(&data, &grid).unwrap();
    let trace = extract_radiation(&field).unwrap();
    io::write_radiation(&dir.join("radiation_Hplus.csv"), &dir.join("radiation_Iplus.csv"), &trace).unwrap();
    let times: Vec<f64> = (0..=8).map(|k| 10.0 * k as f64).collect();
    let b = energy_breakdown(&field, &times).unwrap();
    let rows: Vec<io::EnergyAuditRecord> = b.series.iter().map(Into::into).collect();
    io::write_energy_audit(&dir.join("energy_audit.csv"), &rows).unwrap();
    let back = restrict_to_cauchy(&evolve_goursat(&trace, &grid).unwrap()).unwrap();
    io::write_cauchy(&dir.join("cauchy_out.csv"), &back).unwrap();
    let inputs = AuditInputs::from_field(&field, DEFAULT_LATE_TIME).unwrap();
    let audit: Vec<io::AuditRecord> = inequality_audit(&inputs).unwrap().iter().map(Into::into).collect();
    io::write_audit(&dir.join("audit.csv"), &audit).unwrap();
    let report = scattering_report("fixture", &data, &grid, &times, 8, 99).unwrap();
    io::write_scattering_report(&dir.join("scattering_report.csv"), &[(&report).into()]).unwrap();
}

/// 9. Repeated runs write byte-identical CSVs.
fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_artifacts(a.path());
    write_artifacts(b.path());
    let mut names: Vec<String> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| std::fs::read(a.path().join(n)).unwrap() != std::fs::read(b.path().join(n)).unwrap())
        .collect();
    outcome(
        differing.is_empty() && names.len() == 6,
        format!("{} files compared, differing: {differing:?}", names.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("flat exactness", flat_exactness),
        ("energy identity", energy_identity),
        ("Goursat round trip", goursat_roundtrip),
        ("two-sided estimates", two_sided_estimates),
        ("energy decay envelope", energy_decay),
        ("pointwise decay envelope", pointwise_decay),
        ("Sobolev probe", sobolev_probe),
        ("Lipschitz probes", lipschitz),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {}: {}",
            k + 1,
            if result.pass { "PASS" } else { "FAIL" },
            name,
            result.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
