//! Benchmark fixtures.

use scatterlab_core::{BlackHoleParams, CauchyData, GaussianPulse, ModeSpec, NullGrid, PulseKind};
use scatterlab_core::fields::make_grid;

/// Unit-mass nonlinear grid on `[-120, 120]²` with a time-symmetric pulse.
pub fn fixture(n: usize) -> (NullGrid, CauchyData) {
    let grid = make_grid(120.0, 120.0, n, &BlackHoleParams::unit_mass(), ModeSpec::spherical_nonlinear())
        .expect("fixture grid");
    let data = GaussianPulse::new(1.0, 10.0, 2.0, PulseKind::TimeSymmetric)
        .and_then(|p| p.sample_on_grid(&grid))
        .expect("fixture data");
    (grid, data)
}
