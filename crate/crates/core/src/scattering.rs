//! Trace operators, their inverse, the scattering map and Lipschitz probes.
//!
//! The past trace is obtained from the future one by time reflection: the
//! exterior is static and the equation is invariant under `t → -t`, so
//! `𝕋⁻(ψ̂₀, ψ̂₁)` is the reflected image of `𝕋⁺(ψ̂₀, -ψ̂₁)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::energy::{energy_breakdown, norm_h, norm_hplus, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::evolve::{
    evolve_forward, evolve_goursat, evolve_past, extract_past_radiation, extract_radiation,
    restrict_to_cauchy,
};
use crate::fields::{BoundaryData, BoundarySide, CauchyData, GaussianPulse, NullGrid, PulseKind};

/// `𝕋⁺`: Cauchy data to future radiation data.
pub fn trace_forward(data: &CauchyData, grid: &NullGrid) -> Result<BoundaryData> {
    extract_radiation(&evolve_forward(data, grid)?)
}

/// `𝕋⁻` through the reflection identity.
pub fn trace_backward(data: &CauchyData, grid: &NullGrid) -> Result<BoundaryData> {
    trace_forward(&data.time_reversed(), grid)?.reflected()
}

/// `𝕋⁻` by marching the Cauchy problem into the past.
pub fn trace_backward_direct(data: &CauchyData, grid: &NullGrid) -> Result<BoundaryData> {
    extract_past_radiation(&evolve_past(data, grid)?)
}

/// `(𝕋^±)⁻¹`: solve the characteristic problem and read the `t = 0` data.
pub fn inverse_trace(bdata: &BoundaryData, grid: &NullGrid) -> Result<CauchyData> {
    restrict_to_cauchy(&evolve_goursat(bdata, grid)?)
}

/// `𝕊 = 𝕋⁺ ∘ (𝕋⁻)⁻¹`. The past data are reflected onto the future edges,
/// inverted there, and the recovered data time-reversed before the
/// forward trace.
pub fn scattering_map(past: &BoundaryData, grid: &NullGrid) -> Result<BoundaryData> {
    if past.side() != BoundarySide::Past {
        return Err(Error::config("scattering map expects past radiation data"));
    }
    let data = inverse_trace(&past.reflected()?, grid)?.time_reversed();
    trace_forward(&data, grid)
}

/// `‖(𝕋⁺)⁻¹ 𝕋⁺ d - d‖_ℋ / ‖d‖_ℋ`; zero for zero data.
pub fn roundtrip_residual(data: &CauchyData, grid: &NullGrid) -> Result<f64> {
    let background = grid.background();
    let norm = norm_h(data, background)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    let restored = inverse_trace(&trace_forward(data, grid)?, grid)?;
    Ok(norm_h(&restored.difference(data)?, background)? / norm)
}

/// `‖𝕋⁺d‖_{ℋ⁺} / ‖d‖_ℋ`; zero for zero data.
pub fn forward_norm_ratio(data: &CauchyData, grid: &NullGrid) -> Result<f64> {
    let norm = norm_h(data, grid.background())?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(norm_hplus(&trace_forward(data, grid)?) / norm)
}

/// `‖𝕋⁺d_a - 𝕋⁺d_b‖_{ℋ⁺} / ‖d_a - d_b‖_ℋ`.
pub fn lipschitz_probe(d_a: &CauchyData, d_b: &CauchyData, grid: &NullGrid) -> Result<f64> {
    let gap = norm_h(&d_a.difference(d_b)?, grid.background())?;
    if gap == 0.0 {
        return Err(Error::Degenerate("Lipschitz probe on coincident data".into()));
    }
    let ta = trace_forward(d_a, grid)?;
    let tb = trace_forward(d_b, grid)?;
    Ok(norm_hplus(&ta.difference(&tb)?) / gap)
}

/// Outcome of a Lipschitz sweep around one base datum.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzSweep {
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Largest `ℋ` norm among the probed data.
    pub ball_radius: f64,
}

/// Smooth random perturbation direction: a Gaussian of random centre,
/// width and sign inside `[lo, hi]`, with random time profile.
fn random_direction(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Result<GaussianPulse> {
    let width = rng.gen_range(1.0..3.0);
    let margin = GaussianPulse::CUTOFF_WIDTHS * width + 1.0;
    let center = rng.gen_range(lo + margin..hi - margin);
    let amplitude = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..1.0);
    let kind = match rng.gen_range(0..3) {
        0 => PulseKind::TimeSymmetric,
        1 => PulseKind::Outgoing,
        _ => PulseKind::Ingoing,
    };
    GaussianPulse::new(amplitude, center, width, kind)
}

/// Probe `𝕋⁺` between `base` and `base + ε·δ_k` for `directions` random
/// directions `δ_k`; runs in parallel and is deterministic in `seed`.
pub fn lipschitz_sweep(
    base: &CauchyData,
    grid: &NullGrid,
    epsilon: f64,
    directions: usize,
    seed: u64,
    support: (f64, f64),
) -> Result<LipschitzSweep> {
    if directions == 0 {
        return Err(Error::config("Lipschitz sweep needs at least one direction"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pulses = (0..directions)
        .map(|_| random_direction(&mut rng, support.0, support.1))
        .collect::<Result<Vec<_>>>()?;
    let base_trace = trace_forward(base, grid)?;
    let background = grid.background();
    let results = pulses
        .par_iter()
        .map(|p| {
            let delta = p.sample(base.rstar(), *base.mode())?;
            let other = base.sum(&delta.scaled(epsilon, epsilon))?;
            let gap = norm_h(&other.difference(base)?, background)?;
            if gap == 0.0 {
                return Err(Error::Degenerate("perturbation vanished on the samples".into()));
            }
            let trace = trace_forward(&other, grid)?;
            let ratio = norm_hplus(&trace.difference(&base_trace)?) / gap;
            Ok((ratio, norm_h(&other, background)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = results.iter().map(|r| r.0).collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let ball_radius = results
        .iter()
        .map(|r| r.1)
        .fold(norm_h(base, background)?, f64::max);
    Ok(LipschitzSweep {
        ratios,
        max_ratio,
        ball_radius,
    })
}

/// One row of the scattering report.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringReport {
    pub run_id: String,
    pub h: f64,
    pub forward_norm_ratio: f64,
    pub roundtrip_residual: f64,
    pub lipschitz_max_ratio: f64,
    pub ball_radius: f64,
    pub energies: EnergyBreakdown,
}

/// Run every operator on one datum.
pub fn scattering_report(
    run_id: &str,
    data: &CauchyData,
    grid: &NullGrid,
    audit_times: &[f64],
    lipschitz_directions: usize,
    seed: u64,
) -> Result<ScatteringReport> {
    let field = evolve_forward(data, grid)?;
    let energies = energy_breakdown(&field, audit_times)?;
    let trace = extract_radiation(&field)?;
    let norm = norm_h(data, grid.background())?;
    let forward_norm_ratio = if norm == 0.0 { 0.0 } else { norm_hplus(&trace) / norm };
    let roundtrip = if norm == 0.0 {
        0.0
    } else {
        let restored = inverse_trace(&trace, grid)?;
        norm_h(&restored.difference(data)?, grid.background())? / norm
    };
    let scale = data.max_abs().max(1e-3);
    let sweep = lipschitz_sweep(
        data,
        grid,
        1e-3 * scale,
        lipschitz_directions,
        seed,
        grid.cauchy_range(),
    )?;
    Ok(ScatteringReport {
        run_id: run_id.to_string(),
        h: grid.h(),
        forward_norm_ratio,
        roundtrip_residual: roundtrip,
        lipschitz_max_ratio: sweep.max_ratio,
        ball_radius: sweep.ball_radius,
        energies,
    })
}
