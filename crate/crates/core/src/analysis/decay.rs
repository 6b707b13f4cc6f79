//! Power-law fits of late-time energy and pointwise amplitude.
//!
//! Only exponents are measured; the constants in front of the decay
//! envelopes are not computable and are never estimated.

use crate::energy::{tilted_end, tilted_point, FieldProbe};
use crate::error::{Error, Result};
use crate::fields::GridField;
use crate::numerics::{fit_line, intervals_for};

/// Default fit window in units of `M`: skips the prompt response and the
/// quasinormal transient, and stays clear of the truncation edges.
pub const DEFAULT_WINDOW: (f64, f64) = (20.0, 80.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayRegion {
    /// `E_{𝒮_τ}` against `(4 + τ²)^{1/2}`.
    Energy,
    /// `max |ψ|` over `2M < r <= 5M` on `ṽ = τ`, against `ṽ`.
    NearHorizon,
    /// `(rv)^{1/2} |ψ|` along `v = v_max`, against `1 + |u|`.
    Exterior,
}

impl DecayRegion {
    pub fn name(self) -> &'static str {
        match self {
            DecayRegion::Energy => "energy",
            DecayRegion::NearHorizon => "near_horizon",
            DecayRegion::Exterior => "exterior",
        }
    }

    /// Abscissa of the log-log fit for parameter `τ`.
    fn abscissa(self, tau: f64) -> f64 {
        match self {
            DecayRegion::Energy => 0.5 * (4.0 + tau * tau).ln(),
            DecayRegion::NearHorizon => tau.ln(),
            DecayRegion::Exterior => (1.0 + tau.abs()).ln(),
        }
    }

    /// Largest slope compatible with the decay envelope for any admissible
    /// exponent.
    pub fn slope_bound(self) -> f64 {
        match self {
            DecayRegion::Energy => -1.0,
            DecayRegion::NearHorizon => -0.5,
            DecayRegion::Exterior => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub region: DecayRegion,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

impl DecayFit {
    pub fn within_envelope(&self) -> bool {
        self.slope <= self.region.slope_bound()
    }
}

/// Fit `ln y` against the region's abscissa over samples `(τ, y)` with
/// `τ` in `window`.
pub fn fit_decay_samples(region: DecayRegion, samples: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(hi > lo && lo >= 0.0) {
        return Err(Error::config(format!("fit window needs 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .collect();
    if inside.len() < 5 {
        return Err(Error::Degenerate(format!(
            "{} fit needs >= 5 samples in [{lo}, {hi}], got {}",
            region.name(),
            inside.len()
        )));
    }
    if let Some((t, y)) = inside.iter().find(|(_, y)| !(*y > 0.0)) {
        return Err(Error::Degenerate(format!(
            "{} fit sample at {t} is not positive ({y})",
            region.name()
        )));
    }
    let xs: Vec<f64> = inside.iter().map(|(t, _)| region.abscissa(*t)).collect();
    let ys: Vec<f64> = inside.iter().map(|(_, y)| y.ln()).collect();
    let line = fit_line(&xs, &ys)?;
    Ok(DecayFit {
        region,
        tau_lo: lo,
        tau_hi: hi,
        slope: line.slope,
        intercept: line.intercept,
        r2: line.r2,
        points: inside.len(),
    })
}

/// Slope of `ln E` against `ln (4 + τ²)^{1/2}`.
pub fn fit_energy_decay(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    fit_decay_samples(DecayRegion::Energy, series, window)
}

/// `max |ψ|`, `ψ = φ/r`, over the part of `ṽ = τ` with `2M < r <= 5M`
/// inside the lattice.
pub fn near_horizon_amplitude(probe: &FieldProbe<'_>, tau: f64) -> Result<f64> {
    let grid = probe.grid();
    let params = *grid.params();
    let (_, u_max) = grid.u_range();
    let x_end = tilted_end(&params, tau, u_max)?;
    let x_hi = params.rstar_five_m();
    let count = intervals_for(x_end, x_hi, 0.5 * grid.h());
    let mut best: f64 = 0.0;
    for k in 0..=count {
        let x = x_end + (x_hi - x_end) * k as f64 / count as f64;
        let (u, v, _) = tilted_point(&params, tau, x)?;
        let s = probe.sample(u.min(u_max), v)?;
        best = best.max(s.phi.abs() / params.r_of_rstar(x)?);
    }
    Ok(best)
}

/// `(rv)^{1/2}|ψ| = (v/r)^{1/2}|φ|` at `(u, v_max)`.
pub fn exterior_amplitude(probe: &FieldProbe<'_>, u: f64) -> Result<f64> {
    let grid = probe.grid();
    let (_, v_max) = grid.v_range();
    let r = grid.params().r_of_rstar(0.5 * (v_max - u))?;
    let s = probe.sample(u, v_max)?;
    Ok((v_max / r).sqrt() * s.phi.abs())
}

/// Amplitude samples of a region on the window, spaced by `step` (in `M`).
pub fn pointwise_samples(
    field: &GridField,
    region: DecayRegion,
    window: (f64, f64),
    step: f64,
) -> Result<Vec<(f64, f64)>> {
    let probe = FieldProbe::new(field);
    let mass = field.grid().params().mass();
    let (lo, hi) = (window.0 * mass, window.1 * mass);
    let count = intervals_for(lo, hi, step * mass);
    (0..=count)
        .map(|k| {
            let tau = lo + (hi - lo) * k as f64 / count as f64;
            let y = match region {
                DecayRegion::NearHorizon => near_horizon_amplitude(&probe, tau)?,
                DecayRegion::Exterior => exterior_amplitude(&probe, tau)?,
                DecayRegion::Energy => {
                    return Err(Error::config("energy decay is fitted from the energy series"))
                }
            };
            Ok((tau, y))
        })
        .collect()
}

/// Fit the pointwise envelope of `region` over `window` (in units of `M`).
pub fn fit_pointwise_decay(field: &GridField, region: DecayRegion, window: (f64, f64)) -> Result<DecayFit> {
    let samples = pointwise_samples(field, region, window, 1.0)?;
    let mass = field.grid().params().mass();
    fit_decay_samples(region, &samples, (window.0 * mass, window.1 * mass))
}

/// Whether a sampled profile never increases (up to relative `slack`).
pub fn is_non_increasing(samples: &[(f64, f64)], slack: f64) -> bool {
    samples
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 * (1.0 + slack))
}

/// Local maxima of a sampled profile, including a leading edge maximum.
///
/// Ringing makes the raw amplitude cross zero; the envelope is read off
/// the successive peaks.
pub fn local_peaks(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    if let [first, second, ..] = samples {
        if first.1 > second.1 {
            peaks.push(*first);
        }
    }
    for w in samples.windows(3) {
        if w[1].1 >= w[0].1 && w[1].1 > w[2].1 {
            peaks.push(w[1]);
        }
    }
    peaks
}

/// Exterior envelope check: peaks of `(rv)^{1/2}|ψ|` never grow in `|u|`
/// across the window (in units of `M`).
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCheck {
    pub samples: Vec<(f64, f64)>,
    pub peaks: Vec<(f64, f64)>,
    pub non_increasing: bool,
}

pub fn exterior_envelope(field: &GridField, window: (f64, f64), step: f64) -> Result<EnvelopeCheck> {
    let samples = pointwise_samples(field, DecayRegion::Exterior, window, step)?;
    let peaks = local_peaks(&samples);
    let non_increasing = is_non_increasing(&peaks, 0.0);
    Ok(EnvelopeCheck {
        samples,
        peaks,
        non_increasing,
    })
}
