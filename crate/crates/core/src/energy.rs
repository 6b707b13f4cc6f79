//! Energy fluxes of the mode-reduced field and the discrete energy identity.
//!
//! With `U = ½ V_l φ² + ¼ κ (F/r²) φ⁴` the reduced equation conserves the
//! current `(e, p) = (½φ_t² + ½φ_x² + U, -φ_t φ_x)` in `(t, x = r_*)`.
//! Contracting it with the conormal of each hypersurface gives, per unit
//! angular factor `A_l`:
//!
//! * `t = const`: `∫ [φ_u² + φ_v² + U] dx`
//! * `u = const`: `∫ [φ_v² + U/2] dv`
//! * `v = const`: `∫ [φ_u² + U/2] du`
//! * `ṽ = const` with `a = F λ'`: `∫ [(2 - a) φ_u² + a φ_v² + U] dx`
//!
//! Every integral is a composite trapezoid with step at most `h/2` over
//! interpolants of `φ`, `φ_u` and `φ_v` (see [`FieldProbe`]).

use crate::background::BlackHoleParams;
use crate::error::{Error, Result};
use crate::fields::{Background, BoundaryData, CauchyData, GridField, NodeGeometry, NullGrid};
use crate::numerics::{gradient, intervals_for, trapezoid, trapezoid_fn};

/// Guard for relative residuals of zero-energy runs.
pub const RESIDUAL_FLOOR: f64 = 1e-300;

/// Field value and null derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub phi: f64,
    pub du: f64,
    pub dv: f64,
}

/// Reader of `φ`, `φ_u`, `φ_v` at arbitrary `(u, v)` in the computed part
/// of a field: tensor-product cubic interpolation of node values where a
/// full 4×4 block is available, bilinear otherwise. Node derivatives are
/// fourth-order central differences where the five-point stencil exists.
#[derive(Debug, Clone)]
pub struct FieldProbe<'a> {
    field: &'a GridField,
    du: Vec<f64>,
    dv: Vec<f64>,
}

fn node_derivative(k: usize, n: usize, h: f64, at: impl Fn(usize) -> Option<f64>, fallback: Option<f64>) -> f64 {
    if k >= 2 && k + 2 <= n {
        if let (Some(a), Some(b), Some(c), Some(d)) = (at(k - 2), at(k - 1), at(k + 1), at(k + 2)) {
            return (a - 8.0 * b + 8.0 * c - d) / (12.0 * h);
        }
    }
    fallback.unwrap_or(f64::NAN)
}

/// Lagrange weights of the four nodes `-1, 0, 1, 2` at offset `s ∈ [0, 1]`
/// from node 0.
fn cubic_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Window start and weights for cubic interpolation in one direction.
fn cubic_window(cell: usize, offset: f64, n: usize) -> (usize, [f64; 4]) {
    let start = cell.saturating_sub(1).min(n - 3);
    // offset measured from the window's second node
    let s = offset + cell as f64 - (start + 1) as f64;
    (start, cubic_weights(s))
}

impl<'a> FieldProbe<'a> {
    pub fn new(field: &'a GridField) -> Self {
        let grid = field.grid();
        let n = grid.n();
        let h = grid.h();
        let len = grid.side() * grid.side();
        let mut du = vec![f64::NAN; len];
        let mut dv = vec![f64::NAN; len];
        for i in 0..=n {
            for j in 0..=n {
                if field.is_valid(i, j) {
                    let k = grid.index(i, j);
                    du[k] = node_derivative(i, n, h, |m| field.get(m, j), field.du(i, j));
                    dv[k] = node_derivative(j, n, h, |m| field.get(i, m), field.dv(i, j));
                }
            }
        }
        FieldProbe { field, du, dv }
    }

    pub fn field(&self) -> &GridField {
        self.field
    }

    pub fn grid(&self) -> &NullGrid {
        self.field.grid()
    }

    fn node(&self, i: usize, j: usize) -> Option<ProbeSample> {
        let k = self.grid().index(i, j);
        let phi = self.field.get(i, j)?;
        let (du, dv) = (self.du[k], self.dv[k]);
        (du.is_finite() && dv.is_finite()).then_some(ProbeSample { phi, du, dv })
    }

    pub fn sample(&self, u: f64, v: f64) -> Result<ProbeSample> {
        let grid = self.grid();
        let outside = || Error::MaskIncomplete(format!("point (u={u}, v={v}) lies outside the lattice"));
        let (ci, a) = grid.locate_u(u).ok_or_else(outside)?;
        let (cj, b) = grid.locate_v(v).ok_or_else(outside)?;
        if let Some(s) = self.sample_cubic(ci, a, cj, b) {
            return Ok(s);
        }
        let mut out = ProbeSample {
            phi: 0.0,
            du: 0.0,
            dv: 0.0,
        };
        let corners = [
            (ci, cj, (1.0 - a) * (1.0 - b)),
            (ci + 1, cj, a * (1.0 - b)),
            (ci, cj + 1, (1.0 - a) * b),
            (ci + 1, cj + 1, a * b),
        ];
        for (i, j, w) in corners {
            if w == 0.0 {
                continue;
            }
            let s = self.node(i, j).ok_or_else(|| {
                Error::MaskIncomplete(format!(
                    "node ({i}, {j}) needed at (u={u}, v={v}) is not computed"
                ))
            })?;
            out.phi += w * s.phi;
            out.du += w * s.du;
            out.dv += w * s.dv;
        }
        Ok(out)
    }

    fn sample_cubic(&self, ci: usize, a: f64, cj: usize, b: f64) -> Option<ProbeSample> {
        let n = self.grid().n();
        let (i0, wu) = cubic_window(ci, a, n);
        let (j0, wv) = cubic_window(cj, b, n);
        let mut out = ProbeSample {
            phi: 0.0,
            du: 0.0,
            dv: 0.0,
        };
        for (p, wi) in wu.iter().enumerate() {
            for (q, wj) in wv.iter().enumerate() {
                let s = self.node(i0 + p, j0 + q)?;
                let w = wi * wj;
                out.phi += w * s.phi;
                out.du += w * s.du;
                out.dv += w * s.dv;
            }
        }
        Some(out)
    }

    fn geometry(&self, rstar: f64) -> Result<NodeGeometry> {
        let grid = self.grid();
        grid.background().geometry(rstar, grid.mode())
    }

    fn step(&self) -> f64 {
        0.5 * self.grid().h()
    }

    fn angular(&self) -> f64 {
        self.grid().mode().angular_factor()
    }
}

/// Which terms of the `t = const` density are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyTerms {
    /// Full conserved density, including the `2MR` potential and quartic terms.
    #[default]
    Full,
    /// `½[φ_t² + φ_x² + R²F G_l φ²]`: no `2MR` potential, no quartic term.
    QuarticFree,
}

#[inline]
fn slice_density(terms: EnergyTerms, geo: &NodeGeometry, s: &ProbeSample, gradient_factor: f64) -> f64 {
    let kinetic = s.du * s.du + s.dv * s.dv;
    match terms {
        EnergyTerms::Full => kinetic + geo.potential_density(s.phi),
        EnergyTerms::QuarticFree => kinetic + 0.5 * geo.r2f * gradient_factor * s.phi * s.phi,
    }
}

/// Energy through `{t} × [a, b]` (in `r_*`).
pub fn flux_sigma_t(probe: &FieldProbe<'_>, t: f64, a: f64, b: f64) -> Result<f64> {
    flux_sigma_t_terms(probe, t, a, b, EnergyTerms::Full)
}

pub fn flux_sigma_t_terms(
    probe: &FieldProbe<'_>,
    t: f64,
    a: f64,
    b: f64,
    terms: EnergyTerms,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let g = probe.grid().mode().gradient_factor();
    let integral = trapezoid_fn(a, b, intervals_for(a, b, probe.step()), |x| {
        let s = probe.sample(t - x, t + x)?;
        Ok(slice_density(terms, &probe.geometry(x)?, &s, g))
    })?;
    Ok(probe.angular() * integral)
}

/// Energy through the outgoing null segment `{u} × [v_a, v_b]`.
pub fn flux_u_line(probe: &FieldProbe<'_>, u: f64, v_a: f64, v_b: f64) -> Result<f64> {
    if v_b <= v_a {
        return Ok(0.0);
    }
    let integral = trapezoid_fn(v_a, v_b, intervals_for(v_a, v_b, probe.step()), |v| {
        let s = probe.sample(u, v)?;
        let geo = probe.geometry(0.5 * (v - u))?;
        Ok(s.dv * s.dv + 0.5 * geo.potential_density(s.phi))
    })?;
    Ok(probe.angular() * integral)
}

/// Energy through the ingoing null segment `[u_a, u_b] × {v}`.
pub fn flux_v_line(probe: &FieldProbe<'_>, v: f64, u_a: f64, u_b: f64) -> Result<f64> {
    if u_b <= u_a {
        return Ok(0.0);
    }
    let integral = trapezoid_fn(u_a, u_b, intervals_for(u_a, u_b, probe.step()), |u| {
        let s = probe.sample(u, v)?;
        let geo = probe.geometry(0.5 * (v - u))?;
        Ok(s.du * s.du + 0.5 * geo.potential_density(s.phi))
    })?;
    Ok(probe.angular() * integral)
}

/// Flux through the near-horizon piece of `ṽ = const`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedFlux {
    pub value: f64,
    /// Inner end of the integrated piece (in `r_*`).
    pub x_end: f64,
    /// `v` where the piece meets `u = u_max`. The slice always reaches the
    /// horizon, so on a finite lattice it is always cut there.
    pub v_end: f64,
}

/// `u(x) = ṽ + λ(x) - 2x` and `v(x) = ṽ + λ(x)` along a `ṽ = const` slice,
/// plus `a = F λ'`.
pub(crate) fn tilted_point(params: &BlackHoleParams, tilde_v: f64, x: f64) -> Result<(f64, f64, f64)> {
    let y = params.excess_of_rstar(x)?;
    let lam = params.lambda_of_excess(y)?;
    let a = params.metric_f_of_excess(y) * lam.slope;
    let v = tilde_v + lam.value;
    Ok((v - 2.0 * x, v, a))
}

/// Point of `ṽ = const` (in `r_*`) where it meets `u = u_max`, or
/// `(5M/2)_*` if the near-horizon piece lies entirely beyond the lattice.
pub fn tilted_end(params: &BlackHoleParams, tilde_v: f64, u_max: f64) -> Result<f64> {
    let x_b = params.rstar_break();
    if tilted_point(params, tilde_v, x_b)?.0 >= u_max {
        return Ok(x_b);
    }
    // u > ṽ + λ(2M) - 2x, so this lower bracket already lies beyond u_max
    let mut lo = 0.5 * (tilde_v + params.lambda_at_horizon() - u_max) - 1.0;
    let mut hi = x_b;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tilted_point(params, tilde_v, mid)?.0 >= u_max {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Energy through `ṽ = const` for `r_* ∈ [x_end, (5M/2)_*]`, where the piece
/// is cut at `u = u_max` (along it `u` decreases strictly in `r_*`).
pub fn flux_tilted(probe: &FieldProbe<'_>, tilde_v: f64) -> Result<TiltedFlux> {
    let grid = probe.grid();
    let params = *grid.params();
    let (_, u_max) = grid.u_range();
    let x_b = params.rstar_break();
    let x_end = tilted_end(&params, tilde_v, u_max)?;
    let integral = trapezoid_fn(x_end, x_b, intervals_for(x_end, x_b, probe.step()), |x| {
        let (u, v, a) = tilted_point(&params, tilde_v, x)?;
        let s = probe.sample(u.min(u_max), v)?;
        let geo = probe.geometry(x)?;
        Ok((2.0 - a) * s.du * s.du + a * s.dv * s.dv + geo.potential_density(s.phi))
    })?;
    Ok(TiltedFlux {
        value: probe.angular() * integral,
        x_end,
        v_end: tilted_point(&params, tilde_v, x_end)?.1,
    })
}

/// Energy through the three pieces of `𝒮_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceEnergy {
    pub t: f64,
    /// `ṽ = T + (r_FH)_*`, `2M < r < 5M/2`.
    pub inner: f64,
    /// `t = T + (r_FH)_*`, `5M/2 <= r < r_FH`.
    pub outer: f64,
    /// `u = T`, `r >= r_FH`.
    pub null: f64,
    pub total: f64,
    /// Where the inner piece meets `u = u_max`.
    pub v_end: f64,
}

/// `E_{𝒮_T}` split into its pieces.
pub fn energy_s_t(probe: &FieldProbe<'_>, t: f64) -> Result<SliceEnergy> {
    let grid = probe.grid();
    let params = grid.params();
    let (_, v_max) = grid.v_range();
    let x_fh = params.rstar_fh();
    let x_b = params.rstar_break();
    let t_shift = t + x_fh;
    let inner = flux_tilted(probe, t_shift)?;
    let outer = flux_sigma_t(probe, t_shift, x_b, x_fh)?;
    let null = flux_u_line(probe, t, t + 2.0 * x_fh, v_max)?;
    Ok(SliceEnergy {
        t,
        inner: inner.value,
        outer,
        null,
        total: inner.value + outer + null,
        v_end: inner.v_end,
    })
}

/// One row of the discrete energy identity on the region between `Σ₀`,
/// the two truncation edges and `𝒮_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureAudit {
    pub t: f64,
    pub e_sigma0: f64,
    pub slice: SliceEnergy,
    /// Flux through `u = u_max` up to where `𝒮_T` meets it.
    pub e_hplus_cum: f64,
    /// Flux through `v = v_max` for `u <= T`.
    pub e_iplus_cum: f64,
    /// `(E_Σ₀ - E_𝔥 - E_ℐ - E_𝒮) / max(E_Σ₀, ε)`.
    pub signed_residual: f64,
}

impl ClosureAudit {
    pub fn residual(&self) -> f64 {
        self.signed_residual.abs()
    }
}

/// Energy through the whole `t = 0` anti-diagonal.
pub fn energy_sigma0(probe: &FieldProbe<'_>) -> Result<f64> {
    let grid = probe.grid();
    let n = grid.n();
    let mut xs = Vec::with_capacity(n + 1);
    let mut density = Vec::with_capacity(n + 1);
    for i in (0..=n).rev() {
        let j = n - i;
        let s = probe.node(i, j).ok_or_else(|| {
            Error::MaskIncomplete(format!("t = 0 node ({i}, {j}) lacks derivatives"))
        })?;
        let geo = grid.geometry(i, j);
        xs.push(geo.rstar);
        density.push(slice_density(EnergyTerms::Full, geo, &s, 0.0));
    }
    Ok(probe.angular() * trapezoid(&xs, &density))
}

pub fn closure_at(probe: &FieldProbe<'_>, e_sigma0: f64, t: f64) -> Result<ClosureAudit> {
    let grid = probe.grid();
    let (u_min, u_max) = grid.u_range();
    let (v_min, v_max) = grid.v_range();
    let slice = energy_s_t(probe, t)?;
    let e_hplus_cum = flux_u_line(probe, u_max, v_min, slice.v_end)?;
    let e_iplus_cum = flux_v_line(probe, v_max, u_min, t)?;
    let signed_residual =
        (e_sigma0 - (e_hplus_cum + e_iplus_cum + slice.total)) / e_sigma0.max(RESIDUAL_FLOOR);
    Ok(ClosureAudit {
        t,
        e_sigma0,
        slice,
        e_hplus_cum,
        e_iplus_cum,
        signed_residual,
    })
}

/// Relative defect of the energy identity at `T`.
pub fn closure_residual(field: &GridField, t: f64) -> Result<f64> {
    let probe = FieldProbe::new(field);
    let e0 = energy_sigma0(&probe)?;
    Ok(closure_at(&probe, e0, t)?.residual())
}

/// Energies of one forward run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub e_sigma0: f64,
    /// Flux through the whole `u = u_max` edge.
    pub e_hplus: f64,
    /// Flux through the whole `v = v_max` edge.
    pub e_iplus: f64,
    pub series: Vec<ClosureAudit>,
    /// `|residual|` at the last audited `T`.
    pub closure_residual: f64,
}

impl EnergyBreakdown {
    /// Flux through both future edges; equals `E_Σ₀` up to discretization.
    pub fn e_radiated(&self) -> f64 {
        self.e_hplus + self.e_iplus
    }

    /// Defect of `E_Σ₀ = E_𝔥 + E_ℐ` over the whole future triangle.
    pub fn edge_residual(&self) -> f64 {
        (self.e_sigma0 - self.e_radiated()).abs() / self.e_sigma0.max(RESIDUAL_FLOOR)
    }
}

/// Audit the energy identity at each `T` in `times` (ascending).
pub fn energy_breakdown(field: &GridField, times: &[f64]) -> Result<EnergyBreakdown> {
    if times.is_empty() {
        return Err(Error::config("energy audit needs at least one T"));
    }
    let probe = FieldProbe::new(field);
    let grid = field.grid();
    let (u_min, u_max) = grid.u_range();
    let (v_min, v_max) = grid.v_range();
    let e_sigma0 = energy_sigma0(&probe)?;
    let e_hplus = flux_u_line(&probe, u_max, v_min, v_max)?;
    let e_iplus = flux_v_line(&probe, v_max, u_min, u_max)?;
    let series = times
        .iter()
        .map(|&t| closure_at(&probe, e_sigma0, t))
        .collect::<Result<Vec<_>>>()?;
    let closure_residual = series.last().map(ClosureAudit::residual).unwrap_or(0.0);
    Ok(EnergyBreakdown {
        e_sigma0,
        e_hplus,
        e_iplus,
        series,
        closure_residual,
    })
}

/// Quartic-free energy on `t = const` over the part of the slice inside
/// the lattice.
pub fn quartic_free_energy(field: &GridField, t: f64) -> Result<f64> {
    let probe = FieldProbe::new(field);
    quartic_free_energy_with(&probe, t)
}

pub fn quartic_free_energy_with(probe: &FieldProbe<'_>, t: f64) -> Result<f64> {
    let grid = probe.grid();
    let (_, u_max) = grid.u_range();
    let (_, v_max) = grid.v_range();
    flux_sigma_t_terms(probe, t, t - u_max, v_max - t, EnergyTerms::QuarticFree)
}

/// Per-sample geometry of Cauchy data.
fn data_geometry(data: &CauchyData, background: &Background) -> Result<Vec<NodeGeometry>> {
    data.rstar()
        .iter()
        .map(|&x| background.geometry(x, data.mode()))
        .collect()
}

/// Energy of Cauchy data on `t = 0`.
pub fn data_energy(data: &CauchyData, background: &Background, terms: EnergyTerms) -> Result<f64> {
    let geo = data_geometry(data, background)?;
    let d0 = gradient(data.rstar(), data.psi0());
    let g = data.mode().gradient_factor();
    let density: Vec<f64> = (0..data.len())
        .map(|k| {
            let (p0, p1) = (data.psi0()[k], data.psi1()[k]);
            let base = 0.5 * (p1 * p1 + d0[k] * d0[k]);
            match terms {
                EnergyTerms::Full => base + geo[k].potential_density(p0),
                EnergyTerms::QuarticFree => base + 0.5 * geo[k].r2f * g * p0 * p0,
            }
        })
        .collect();
    Ok(data.mode().angular_factor() * trapezoid(data.rstar(), &density))
}

/// `‖(ψ̂₀, ψ̂₁)‖_ℋ = (A/2 ∫ [ψ̂₁² + ψ̂₀'² + R²F G ψ̂₀² + (2MR + 1) R²F ψ̂₀²])^{1/2}`.
pub fn norm_h(data: &CauchyData, background: &Background) -> Result<f64> {
    let geo = data_geometry(data, background)?;
    let d0 = gradient(data.rstar(), data.psi0());
    let g = data.mode().gradient_factor();
    let density: Vec<f64> = (0..data.len())
        .map(|k| {
            let (p0, p1) = (data.psi0()[k], data.psi1()[k]);
            let geo = &geo[k];
            p1 * p1 + d0[k] * d0[k] + geo.r2f * (g + geo.two_m_r + 1.0) * p0 * p0
        })
        .collect();
    let sq = 0.5 * data.mode().angular_factor() * trapezoid(data.rstar(), &density);
    Ok(sq.max(0.0).sqrt())
}

/// `‖(ξ, ζ)‖_{ℋ⁺} = (A ∫ ξ'² + A ∫ ζ'²)^{1/2}` over the two edges.
pub fn norm_hplus(bdata: &BoundaryData) -> f64 {
    let sq = |e: &crate::fields::EdgeTrace| {
        let d2: Vec<f64> = e.slopes.iter().map(|s| s * s).collect();
        trapezoid(&e.coords, &d2)
    };
    let a = bdata.mode().angular_factor();
    (a * (sq(bdata.horizon()) + sq(bdata.infinity()))).max(0.0).sqrt()
}

/// Energy written in terms of the unscaled field `ψ = ψ̂/r`:
/// `½ A ∫ [r² ψ_t² + r² ψ_x² + F G ψ² + (F/2) κ r² ψ⁴] dr_*`.
///
/// For compactly supported data it equals [`data_energy`] with
/// [`EnergyTerms::Full`] up to discretization: integrating `r²ψ_x²` by
/// parts absorbs the `2MFψ̂²/r³` potential term, leaving only a boundary
/// term that compact support removes.
pub fn energy_original_field(data: &CauchyData, params: &BlackHoleParams) -> Result<f64> {
    let background = Background::schwarzschild(*params);
    let geo = data_geometry(data, &background)?;
    let psi: Vec<f64> = (0..data.len()).map(|k| data.psi0()[k] / geo[k].r).collect();
    let dpsi = gradient(data.rstar(), &psi);
    let g = data.mode().gradient_factor();
    let kappa = data.mode().kappa();
    let density: Vec<f64> = (0..data.len())
        .map(|k| {
            let geo = &geo[k];
            let r2 = geo.r * geo.r;
            let psi_t = data.psi1()[k] / geo.r;
            let p2 = psi[k] * psi[k];
            0.5 * (r2 * psi_t * psi_t
                + r2 * dpsi[k] * dpsi[k]
                + geo.f * g * p2
                + 0.5 * kappa * geo.f * r2 * p2 * p2)
        })
        .collect();
    Ok(data.mode().angular_factor() * trapezoid(data.rstar(), &density))
}
