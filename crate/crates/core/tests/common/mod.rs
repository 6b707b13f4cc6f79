#![allow(dead_code)]

use scatterlab_core::evolve::evolve_forward;
use scatterlab_core::fields::{make_flat_grid, make_grid};
use scatterlab_core::{BlackHoleParams, CauchyData, GaussianPulse, GridField, ModeSpec, NullGrid, PulseKind};

pub const EXTENT: f64 = 120.0;

/// The Gaussian fixture: `M = 1`, `l = 0`, nonlinear, pulse at `r_* = 10`
/// of width 2, lattice `u_max = v_max = 120`.
pub fn fixture_grid(n: usize) -> NullGrid {
    make_grid(EXTENT, EXTENT, n, &BlackHoleParams::unit_mass(), ModeSpec::spherical_nonlinear()).unwrap()
}

pub fn fixture_pulse(amplitude: f64) -> GaussianPulse {
    GaussianPulse::new(amplitude, 10.0, 2.0, PulseKind::TimeSymmetric).unwrap()
}

pub fn fixture_data(grid: &NullGrid, amplitude: f64) -> CauchyData {
    fixture_pulse(amplitude).sample_on_grid(grid).unwrap()
}

pub fn fixture_field(n: usize, amplitude: f64) -> (CauchyData, GridField) {
    let grid = fixture_grid(n);
    let data = fixture_data(&grid, amplitude);
    let field = evolve_forward(&data, &grid).unwrap();
    (data, field)
}

pub fn flat_grid(n: usize, extent: f64) -> NullGrid {
    make_flat_grid(extent, extent, n, &BlackHoleParams::unit_mass(), ModeSpec::spherical_linear()).unwrap()
}
