//! Observed convergence orders over nested resolutions `n, 2n, 4n`.

use rayon::prelude::*;

use crate::energy::closure_residual;
use crate::error::{Error, Result};
use crate::evolve::{evolve_forward_with, Stencil};
use crate::fields::{Background, CauchyData, GaussianPulse, GridField, ModeSpec, NullGrid};
use crate::scattering::roundtrip_residual;

/// Errors below this (relative to the field scale) count as round-off.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Sampled afresh on each lattice's `t = 0` nodes.
    Pulse(GaussianPulse),
    /// Fixed samples, interpolated onto every lattice.
    Samples(CauchyData),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSetup {
    pub background: Background,
    pub mode: ModeSpec,
    pub u_max: f64,
    pub v_max: f64,
    pub data: DataSource,
    pub stencil: Stencil,
    /// `T` of the closure audit.
    pub audit_time: f64,
}

impl ConvergenceSetup {
    pub fn grid(&self, n: usize) -> Result<NullGrid> {
        NullGrid::new(self.u_max, self.v_max, n, self.background, self.mode)
    }

    pub fn data_on(&self, grid: &NullGrid) -> Result<CauchyData> {
        match &self.data {
            DataSource::Pulse(p) => p.sample_on_grid(grid),
            DataSource::Samples(d) => Ok(d.clone()),
        }
    }

    fn solve(&self, n: usize) -> Result<(CauchyData, GridField)> {
        let grid = self.grid(n)?;
        let data = self.data_on(&grid)?;
        let field = evolve_forward_with(&data, &grid, self.stencil)?;
        Ok((data, field))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    FieldMaxNorm,
    ClosureResidual,
    RoundtripResidual,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::FieldMaxNorm => "field_max_norm",
            Quantity::ClosureResidual => "closure_residual",
            Quantity::RoundtripResidual => "roundtrip_residual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceFlag {
    Ok,
    /// Errors at round-off; the order is meaningless.
    Exact,
    /// Some error failed to shrink under refinement.
    NonMonotone,
}

impl ConvergenceFlag {
    pub fn name(self) -> &'static str {
        match self {
            ConvergenceFlag::Ok => "ok",
            ConvergenceFlag::Exact => "exact",
            ConvergenceFlag::NonMonotone => "non_monotone",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub quantity: Quantity,
    /// Error measures, coarse to fine.
    pub errors: Vec<f64>,
    /// `log₂(e_k / e_{k+1})` for consecutive errors.
    pub orders: Vec<f64>,
    pub flag: ConvergenceFlag,
}

impl ConvergenceRow {
    pub fn from_errors(quantity: Quantity, errors: Vec<f64>, exact_below: f64) -> Self {
        let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        let flag = if errors.iter().all(|e| *e <= exact_below) {
            ConvergenceFlag::Exact
        } else if errors.windows(2).any(|w| !(w[1] < w[0])) {
            ConvergenceFlag::NonMonotone
        } else {
            ConvergenceFlag::Ok
        };
        ConvergenceRow {
            quantity,
            errors,
            orders,
            flag,
        }
    }

    /// Order from the finest pair; `None` when flagged exact.
    pub fn order(&self) -> Option<f64> {
        match self.flag {
            ConvergenceFlag::Exact => None,
            _ => self.orders.last().copied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub resolutions: [usize; 3],
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn row(&self, q: Quantity) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.quantity == q)
    }
}

fn check_nested(resolutions: &[usize]) -> Result<[usize; 3]> {
    match resolutions {
        [a, b, c] if *b == 2 * a && *c == 2 * b => Ok([*a, *b, *c]),
        _ => Err(Error::config(format!(
            "convergence study needs nested resolutions n, 2n, 4n, got {resolutions:?}"
        ))),
    }
}

/// Max differences between successive lattices on the coarse nodes valid
/// at every resolution.
fn field_differences(fields: &[GridField; 3]) -> Vec<f64> {
    let n = fields[0].grid().n();
    let mut d = [0.0f64; 2];
    for i in 0..=n {
        for j in 0..=n {
            let vals = [
                fields[0].get(i, j),
                fields[1].get(2 * i, 2 * j),
                fields[2].get(4 * i, 4 * j),
            ];
            if let [Some(a), Some(b), Some(c)] = vals {
                d[0] = d[0].max((a - b).abs());
                d[1] = d[1].max((b - c).abs());
            }
        }
    }
    d.to_vec()
}

/// Self-convergence of the field alone.
pub fn field_convergence(setup: &ConvergenceSetup, resolutions: &[usize]) -> Result<ConvergenceRow> {
    let res = check_nested(resolutions)?;
    let solved = res
        .par_iter()
        .map(|&n| setup.solve(n).map(|(_, f)| f))
        .collect::<Result<Vec<_>>>()?;
    let fields: [GridField; 3] = solved.try_into().expect("three resolutions");
    let scale = fields[2].max_abs().max(f64::MIN_POSITIVE);
    Ok(ConvergenceRow::from_errors(
        Quantity::FieldMaxNorm,
        field_differences(&fields),
        EXACT_TOL * scale,
    ))
}

/// Orders for the field, the closure residual and the round-trip residual.
pub fn convergence_study(setup: &ConvergenceSetup, resolutions: &[usize]) -> Result<ConvergenceTable> {
    let res = check_nested(resolutions)?;
    let runs = res
        .par_iter()
        .map(|&n| -> Result<(GridField, f64, f64)> {
            let (data, field) = setup.solve(n)?;
            let closure = closure_residual(&field, setup.audit_time)?;
            let roundtrip = roundtrip_residual(&data, field.grid())?;
            Ok((field, closure, roundtrip))
        })
        .collect::<Result<Vec<_>>>()?;
    let closures: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let roundtrips: Vec<f64> = runs.iter().map(|r| r.2).collect();
    let fields: [GridField; 3] = runs
        .into_iter()
        .map(|r| r.0)
        .collect::<Vec<_>>()
        .try_into()
        .expect("three resolutions");
    let scale = fields[2].max_abs().max(f64::MIN_POSITIVE);
    Ok(ConvergenceTable {
        resolutions: res,
        rows: vec![
            ConvergenceRow::from_errors(Quantity::FieldMaxNorm, field_differences(&fields), EXACT_TOL * scale),
            ConvergenceRow::from_errors(Quantity::ClosureResidual, closures, EXACT_TOL),
            ConvergenceRow::from_errors(Quantity::RoundtripResidual, roundtrips, EXACT_TOL),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::BlackHoleParams;
    use crate::fields::PulseKind;

    fn setup(background: Background, mode: ModeSpec, stencil: Stencil) -> ConvergenceSetup {
        ConvergenceSetup {
            background,
            mode,
            u_max: 120.0,
            v_max: 120.0,
            data: DataSource::Pulse(GaussianPulse::new(1.0, 10.0, 2.0, PulseKind::TimeSymmetric).unwrap()),
            stencil,
            audit_time: 80.0,
        }
    }

    #[test]
    fn row_flags() {
        let ok = ConvergenceRow::from_errors(Quantity::ClosureResidual, vec![4e-2, 1e-2, 2.5e-3], 1e-12);
        assert_eq!(ok.flag, ConvergenceFlag::Ok);
        assert!((ok.order().unwrap() - 2.0).abs() < 1e-12);
        let bad = ConvergenceRow::from_errors(Quantity::ClosureResidual, vec![1e-2, 2e-2, 1e-3], 1e-12);
        assert_eq!(bad.flag, ConvergenceFlag::NonMonotone);
        let exact = ConvergenceRow::from_errors(Quantity::FieldMaxNorm, vec![1e-16, 2e-16], 1e-12);
        assert_eq!(exact.flag, ConvergenceFlag::Exact);
        assert_eq!(exact.order(), None);
    }

    #[test]
    fn resolutions_must_nest() {
        let s = setup(
            Background::schwarzschild(BlackHoleParams::unit_mass()),
            ModeSpec::spherical_nonlinear(),
            Stencil::Standard,
        );
        assert!(field_convergence(&s, &[64, 128, 512]).is_err());
        assert!(field_convergence(&s, &[64, 128]).is_err());
    }

    #[test]
    fn flat_linear_field_is_exact() {
        let s = setup(
            Background::flat(BlackHoleParams::unit_mass()),
            ModeSpec::spherical_linear(),
            Stencil::Standard,
        );
        let row = field_convergence(&s, &[64, 128, 256]).unwrap();
        assert_eq!(row.flag, ConvergenceFlag::Exact, "{row:?}");
    }

    #[test]
    fn standard_stencil_is_second_order() {
        let s = setup(
            Background::schwarzschild(BlackHoleParams::unit_mass()),
            ModeSpec::spherical_nonlinear(),
            Stencil::Standard,
        );
        let row = field_convergence(&s, &[256, 512, 1024]).unwrap();
        assert_eq!(row.flag, ConvergenceFlag::Ok);
        let p = row.order().unwrap();
        assert!((1.7..=2.3).contains(&p), "order {p}");
    }

    #[test]
    fn broken_stencil_is_first_order() {
        let s = setup(
            Background::schwarzschild(BlackHoleParams::unit_mass()),
            ModeSpec::spherical_nonlinear(),
            Stencil::Broken,
        );
        let row = field_convergence(&s, &[256, 512, 1024]).unwrap();
        let p = row.order().unwrap();
        assert!((0.7..=1.3).contains(&p), "order {p}");
    }
}
