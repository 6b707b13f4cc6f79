//! Embedding probe on the half-cylinder `[0, ∞) × S²`, reduced to
//! axisymmetric (angle-independent) profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{gradient, trapezoid};

const SPHERE_AREA: f64 = 4.0 * std::f64::consts::PI;

/// Minimum family size for a meaningful maximum.
pub const MIN_PROFILES: usize = 20;

/// `4π∫φ⁶` and `‖φ‖²_{H¹} = 4π∫(φ'² + φ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorms {
    pub l6_pow6: f64,
    pub h1_sq: f64,
}

impl SobolevNorms {
    /// `‖φ‖²_{L⁶} = (4π∫φ⁶)^{1/3}`.
    pub fn l6_sq(&self) -> f64 {
        self.l6_pow6.cbrt()
    }

    /// `‖φ‖²_{L⁶} / ‖φ‖²_{H¹}`; invariant under `φ → kφ`.
    pub fn ratio(&self) -> f64 {
        self.l6_sq() / self.h1_sq
    }

    /// `∫φ⁶ / ‖φ‖²_{H¹}` without the cube root; degree 4 in the amplitude.
    pub fn raw_ratio(&self) -> f64 {
        self.l6_pow6 / self.h1_sq
    }
}

pub fn sobolev_norms(xs: &[f64], phi: &[f64]) -> Result<SobolevNorms> {
    if xs.len() != phi.len() || xs.len() < 3 {
        return Err(Error::config("profile needs >= 3 samples matching the abscissa"));
    }
    if xs[0] < 0.0 {
        return Err(Error::Domain { what: "half-cylinder abscissa", value: xs[0] });
    }
    let dphi = gradient(xs, phi);
    let six: Vec<f64> = phi.iter().map(|p| p.powi(6)).collect();
    let h1: Vec<f64> = phi.iter().zip(&dphi).map(|(p, d)| d * d + p * p).collect();
    let h1_sq = SPHERE_AREA * trapezoid(xs, &h1);
    if !(h1_sq > 0.0) {
        return Err(Error::Degenerate("profile has zero H1 norm".into()));
    }
    Ok(SobolevNorms {
        l6_pow6: SPHERE_AREA * trapezoid(xs, &six),
        h1_sq,
    })
}

/// Smooth compactly supported bump `A·exp(1 − 1/(1 − s²))`, `s = (x − c)/w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// Ranges for the random bump family on `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpFamily {
    pub length: f64,
    pub amplitude: (f64, f64),
    pub width: (f64, f64),
}

impl Default for BumpFamily {
    fn default() -> Self {
        BumpFamily {
            length: 40.0,
            amplitude: (0.1, 10.0),
            width: (0.5, 8.0),
        }
    }
}

impl BumpFamily {
    /// Log-uniform amplitudes and widths; centers keep the support inside.
    pub fn draw(&self, count: usize, seed: u64) -> Vec<Bump> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let amplitude = log_uniform(&mut rng, self.amplitude);
                let width = log_uniform(&mut rng, self.width).min(0.5 * self.length);
                let center = rng.gen_range(width..=self.length - width);
                Bump {
                    amplitude,
                    center,
                    width,
                }
            })
            .collect()
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi <= lo {
        return lo;
    }
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevRow {
    pub index: usize,
    pub bump: Bump,
    pub norms: SobolevNorms,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevSummary {
    pub cells: usize,
    pub rows: Vec<SobolevRow>,
    pub max_ratio: f64,
}

/// Ratios for a family of bumps on a uniform grid of `cells` intervals.
pub fn sobolev_ratio(bumps: &[Bump], length: f64, cells: usize) -> Result<SobolevSummary> {
    if bumps.len() < MIN_PROFILES {
        return Err(Error::config(format!(
            "sobolev probe needs >= {MIN_PROFILES} profiles, got {}",
            bumps.len()
        )));
    }
    if cells < 2 || !(length > 0.0) {
        return Err(Error::config("sobolev grid needs length > 0 and >= 2 cells"));
    }
    let xs: Vec<f64> = (0..=cells).map(|k| length * k as f64 / cells as f64).collect();
    let mut rows = Vec::with_capacity(bumps.len());
    for (index, bump) in bumps.iter().enumerate() {
        let norms = sobolev_norms(&xs, &bump.sample(&xs))?;
        rows.push(SobolevRow {
            index,
            bump: *bump,
            norms,
            ratio: norms.ratio(),
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(SobolevSummary {
        cells,
        rows,
        max_ratio,
    })
}

/// Family maximum at `cells` and `2·cells`, with relative change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevRefinement {
    pub coarse: f64,
    pub fine: f64,
}

impl SobolevRefinement {
    pub fn relative_change(&self) -> f64 {
        (self.fine - self.coarse).abs() / self.coarse
    }
}

pub fn sobolev_refinement(bumps: &[Bump], length: f64, cells: usize) -> Result<SobolevRefinement> {
    Ok(SobolevRefinement {
        coarse: sobolev_ratio(bumps, length, cells)?.max_ratio,
        fine: sobolev_ratio(bumps, length, 2 * cells)?.max_ratio,
    })
}
