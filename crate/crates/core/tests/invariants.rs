mod common;

use common::*;
use proptest::prelude::*;
use scatterlab_core::analysis::audit::{inequality_audit, AuditInputs};
use scatterlab_core::energy::{
    energy_breakdown, energy_original_field, flux_sigma_t, flux_u_line, flux_v_line, data_energy, EnergyTerms,
    FieldProbe,
};
use scatterlab_core::evolve::{evolve_forward, evolve_from_seed, extract_radiation};
use scatterlab_core::fields::make_grid;
use scatterlab_core::scattering::{scattering_map, trace_backward, trace_backward_direct, trace_forward};
use scatterlab_core::energy::{norm_h, norm_hplus, quartic_free_energy};
use scatterlab_core::{
    diamond_backward, diamond_forward, BlackHoleParams, CellCoefficients, GaussianPulse, GridField,
    ModeSpec, PulseKind, Stencil,
};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(256))]

    #[test]
    fn tortoise_derivative_is_inverse_metric_function(excess in 0.2f64..98.0, m in 0.5f64..2.0) {
        let bh = BlackHoleParams::new(m, 10.0 * m).unwrap();
        let r = 2.0 * m + excess * m;
        let step = 1e-5 * r;
        let d = (bh.rstar_of_r(r + step).unwrap() - bh.rstar_of_r(r - step).unwrap()) / (2.0 * step);
        let expected = 1.0 / bh.metric_f(r).unwrap();
        prop_assert!((d - expected).abs() <= 1e-8 * expected, "r={} d={} 1/F={}", r, d, expected);
    }

    #[test]
    fn lambda_profile_invariants(excess in 1e-8f64..98.0) {
        let bh = BlackHoleParams::unit_mass();
        let r = 2.0 + excess;
        let lam = bh.lambda(r).unwrap();
        let f = bh.metric_f(r).unwrap();
        prop_assert!(lam.slope > 0.0);
        prop_assert!(lam.value >= bh.rstar_of_r(r).unwrap() - 1e-12);
        let c = 2.0 - f * lam.slope;
        prop_assert!(c > 0.0 && c <= 2.0);
    }

    #[test]
    fn tortoise_roundtrip(log_excess in (1e-8f64).ln()..(9998.0f64).ln()) {
        let bh = BlackHoleParams::unit_mass();
        let r = 2.0 + log_excess.exp();
        let back = bh.r_of_rstar(bh.rstar_of_r(r).unwrap()).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r, "r={} back={}", r, back);
    }

    #[test]
    fn stencil_steps_invert(s in -2.0f64..2.0, e in -2.0f64..2.0, w in -2.0f64..2.0,
                            potential in 0.0f64..0.1, coupling in 0.0f64..0.5, h in 1e-3f64..0.5) {
        let c = CellCoefficients { potential, coupling };
        let n = diamond_forward(s, e, w, &c, h);
        let back = diamond_backward(n, e, w, &c, h);
        prop_assert!((back - s).abs() <= 8.0 * f64::EPSILON * (s.abs() + e.abs() + w.abs() + n.abs()));
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn node_geometry_is_consistent(u_max in 20.0f64..200.0, v_max in 20.0f64..200.0, n in 8usize..96) {
        let grid = make_grid(u_max, v_max, n, &BlackHoleParams::unit_mass(), ModeSpec::spherical_nonlinear()).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                let x = grid.rstar(i, j);
                prop_assert!((x - 0.5 * (grid.v(j) - grid.u(i))).abs() <= 1e-12 * x.abs().max(1.0));
                let geo = grid.geometry(i, j);
                let back = grid.params().rstar_of_excess(geo.excess).unwrap();
                prop_assert!((back - x).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }
        let again = make_grid(u_max, v_max, n, &BlackHoleParams::unit_mass(), ModeSpec::spherical_nonlinear()).unwrap();
        prop_assert_eq!(grid, again);
    }

    #[test]
    fn flat_transport_is_exact(a in -1.0f64..1.0, b in -1.0f64..1.0, cu in -20.0f64..20.0, cv in -20.0f64..20.0,
                               wu in 1.0f64..6.0, wv in 1.0f64..6.0) {
        let grid = flat_grid(128, 40.0);
        let exact = |u: f64, v: f64| {
            a * (-(u - cu) * (u - cu) / (wu * wu)).exp() + b * (-(v - cv) * (v - cv) / (wv * wv)).exp()
        };
        let n = grid.n();
        let mut seed = GridField::empty(grid.clone());
        for k in n - 1..=n + 1 {
            seed.seed_diagonal(k, exact);
        }
        let field = evolve_from_seed(seed, Stencil::Standard).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                if let Some(x) = field.get(i, j) {
                    prop_assert!((x - exact(grid.u(i), grid.v(j))).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn defocusing_field_stays_bounded(amp in 0.05f64..3.0, center in 0.0f64..20.0, width in 1.0f64..3.0,
                                      kind in 0usize..3) {
        let grid = fixture_grid(256);
        let kind = [PulseKind::TimeSymmetric, PulseKind::Outgoing, PulseKind::Ingoing][kind];
        let data = GaussianPulse::new(amp, center, width, kind).unwrap().sample_on_grid(&grid).unwrap();
        let field = evolve_forward(&data, &grid).unwrap();
        let n = grid.n();
        let band = field.max_abs_on_diagonals(n - 1..=n + 1);
        prop_assert!(field.max_abs() <= 3.0 * band, "max {} band {}", field.max_abs(), band);
    }

    #[test]
    fn fluxes_are_non_negative(amp in -2.0f64..2.0, t in 0.0f64..60.0, u in -100.0f64..100.0) {
        let grid = fixture_grid(256);
        let field = evolve_forward(&fixture_data(&grid, amp), &grid).unwrap();
        let probe = FieldProbe::new(&field);
        let (_, u_max) = grid.u_range();
        let (_, v_max) = grid.v_range();
        let floor = -1e-12;
        prop_assert!(flux_sigma_t(&probe, t, t - u_max, v_max - t).unwrap() >= floor);
        let v_lo = (-u).max(grid.v_range().0);
        prop_assert!(flux_u_line(&probe, u, v_lo, v_max).unwrap() >= floor);
        prop_assert!(flux_v_line(&probe, v_max, grid.u_range().0, u.max(grid.u_range().0 + 1.0)).unwrap() >= floor);
    }
}

/// `E_𝔥 + E_ℐ` grows with `T` while `E_𝒮` falls, both up to the closure
/// defect: the cumulative fluxes are quadratures over moving end points.
#[test]
fn energy_series_is_monotone() {
    let (_, field) = fixture_field(1024, 1.0);
    let times: Vec<f64> = (0..=40).map(|k| 2.0 * k as f64).collect();
    let b = energy_breakdown(&field, &times).unwrap();
    let tol = 2.0 * b.series.iter().map(|c| c.residual()).fold(0.0, f64::max) * b.e_sigma0;
    for w in b.series.windows(2) {
        let (a, c) = (&w[0], &w[1]);
        assert!(c.e_hplus_cum + c.e_iplus_cum >= a.e_hplus_cum + a.e_iplus_cum - tol, "T={}", c.t);
        assert!(c.slice.total <= a.slice.total + tol, "T={} {} > {}", c.t, c.slice.total, a.slice.total);
    }
    // beyond the pulse plus a 40M tail the slice holds almost nothing
    let last = b.series.last().unwrap();
    assert!(last.slice.total / b.e_sigma0 <= 0.05);
}

/// Energy of the unscaled field agrees with the rescaled one at second order.
#[test]
fn original_field_energy_converges_to_rescaled() {
    let params = BlackHoleParams::unit_mass();
    let pulse = GaussianPulse::new(1.0, 10.0, 2.0, PulseKind::Outgoing).unwrap();
    let gap = |n: usize| {
        let xs: Vec<f64> = (0..=n).map(|k| -20.0 + 60.0 * k as f64 / n as f64).collect();
        let data = pulse.sample(&xs, ModeSpec::spherical_nonlinear()).unwrap();
        let bg = scatterlab_core::Background::schwarzschild(params);
        let a = data_energy(&data, &bg, EnergyTerms::Full).unwrap();
        (energy_original_field(&data, &params).unwrap() - a).abs() / a
    };
    let (g1, g2) = (gap(1000), gap(2000));
    assert!(g1 < 1e-3 && g2 < g1 / 3.0, "{g1} {g2}");
}

/// Trace differences stay away from zero for distinct data.
#[test]
fn forward_trace_is_injective_on_probes() {
    let grid = fixture_grid(512);
    let base = fixture_data(&grid, 1.0);
    for (k, eps) in [1e-6, 1e-4, 1e-2].into_iter().enumerate() {
        let bump = GaussianPulse::new(1.0, 5.0 + 5.0 * k as f64, 1.5, PulseKind::Ingoing)
            .unwrap()
            .sample(base.rstar(), *base.mode())
            .unwrap();
        let other = base.sum(&bump.scaled(eps, eps)).unwrap();
        let gap = norm_h(&other.difference(&base).unwrap(), grid.background()).unwrap();
        assert!(gap >= 1e-6 * eps.min(1.0));
        let ta = trace_forward(&base, &grid).unwrap();
        let tb = trace_forward(&other, &grid).unwrap();
        let out = norm_hplus(&ta.difference(&tb).unwrap());
        assert!(out > 1e3 * f64::EPSILON * norm_hplus(&ta), "eps={eps} out={out}");
    }
}

#[test]
fn reflected_past_trace_matches_direct_evolution() {
    let grid = fixture_grid(512);
    let data = GaussianPulse::new(0.8, 12.0, 2.0, PulseKind::Outgoing).unwrap().sample_on_grid(&grid).unwrap();
    let a = trace_backward(&data, &grid).unwrap();
    let b = trace_backward_direct(&data, &grid).unwrap();
    let diff = a.difference(&b).unwrap().max_abs();
    assert!(diff <= 1e-12, "{diff}");
}

/// `‖𝕊 b‖²_{ℋ⁺}` sits inside the two-sided envelope set by the
/// quartic-free energy of the intermediate Cauchy data.
#[test]
fn scattering_map_respects_two_sided_bounds() {
    for amp in [0.25, 1.0, 2.0] {
        let grid = fixture_grid(1024);
        let data = fixture_data(&grid, amp);
        let past = trace_backward(&data, &grid).unwrap();
        let out = scattering_map(&past, &grid).unwrap();
        let field = evolve_forward(&data, &grid).unwrap();
        let inputs = AuditInputs::from_field(&field, 40.0).unwrap();
        let e0 = quartic_free_energy(&field, 0.0).unwrap();
        let sq = norm_hplus(&out).powi(2);
        let slack = inputs.slack() + 1e-9;
        assert!(sq + slack >= e0, "amp {amp}: {sq} < {e0}");
        assert!(sq <= (e0 * e0 + 1.0) * e0 + slack, "amp {amp}: {sq}");
        assert!(inequality_audit(&inputs).unwrap().iter().all(|r| r.pass));
    }
}

/// Past radiation of the reflected problem is consistent with the future
/// radiation of time-reversed data.
#[test]
fn past_trace_of_time_symmetric_data_mirrors_future_trace() {
    let grid = fixture_grid(256);
    let data = fixture_data(&grid, 1.0);
    let fut = extract_radiation(&evolve_forward(&data, &grid).unwrap()).unwrap();
    let past = trace_backward(&data, &grid).unwrap().reflected().unwrap();
    assert!(fut.difference(&past).unwrap().max_abs() <= 1e-12);
}


/// Field self-convergence is second order. The two residuals converge
/// faster than second order on this fixture, so only a floor is imposed.
#[test]
fn fixture_convergence_orders() {
    use scatterlab_core::analysis::convergence::{convergence_study, ConvergenceSetup, DataSource, Quantity};
    let setup = ConvergenceSetup {
        background: scatterlab_core::Background::schwarzschild(BlackHoleParams::unit_mass()),
        mode: ModeSpec::spherical_nonlinear(),
        u_max: EXTENT,
        v_max: EXTENT,
        data: DataSource::Pulse(fixture_pulse(1.0)),
        stencil: Stencil::Standard,
        audit_time: 80.0,
    };
    let table = convergence_study(&setup, &[512, 1024, 2048]).unwrap();
    let order = |q| table.row(q).unwrap().order().unwrap();
    let field = order(Quantity::FieldMaxNorm);
    assert!((1.7..=2.3).contains(&field), "field order {field}");
    for q in [Quantity::ClosureResidual, Quantity::RoundtripResidual] {
        let p = order(q);
        assert!(p >= 1.7, "{} order {p}", q.name());
    }
}
