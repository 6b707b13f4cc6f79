//! Diamond integrator for `4 φ_uv + V_l φ + κ (F/r²) φ³ = 0`.
//!
//! A null cell has south `S = (i-1, j-1)`, east `E = (i-1, j)`, west
//! `W = (i, j-1)` and north `N = (i, j)` corners; its centre shares `r_*`
//! with `S` and `N`. The potential and cubic terms are evaluated at
//! `φ̄ = (φ_E + φ_W)/2`, which keeps the update explicit in both time
//! directions and makes the backward step the exact algebraic inverse of
//! the forward one.
//!
//! Cauchy data seed anti-diagonals `n - 1`, `n`, `n + 1` (`t = -h/2, 0, h/2`)
//! by a second-order Taylor expansion in `t`; everything else is marched.

use crate::error::{Error, Result};
use crate::fields::{
    BoundaryData, BoundarySide, CauchyData, EdgeTrace, GridField, NodeGeometry, NullGrid,
};
use crate::numerics::CubicInterpolator;

/// Equation coefficients at a cell centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCoefficients {
    /// `V_l`.
    pub potential: f64,
    /// `κ F / r²`.
    pub coupling: f64,
}

impl From<&NodeGeometry> for CellCoefficients {
    fn from(g: &NodeGeometry) -> Self {
        CellCoefficients {
            potential: g.potential,
            coupling: g.coupling,
        }
    }
}

/// Where the cell source term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// At `φ̄ = (φ_E + φ_W)/2`: second order, exactly reversible.
    #[default]
    Standard,
    /// At the corner being stepped *from*: first order. Exists to check that
    /// the convergence study detects a degraded scheme.
    Broken,
}

#[inline]
fn source(c: &CellCoefficients, x: f64) -> f64 {
    c.potential * x + c.coupling * x * x * x
}

/// `φ_N = φ_E + φ_W - φ_S - (h²/4)[V φ̄ + κ q φ̄³]`.
#[inline]
pub fn diamond_forward(phi_s: f64, phi_e: f64, phi_w: f64, c: &CellCoefficients, h: f64) -> f64 {
    let bar = 0.5 * (phi_e + phi_w);
    phi_e + phi_w - phi_s - 0.25 * h * h * source(c, bar)
}

/// `φ_S` from the other three corners; exact inverse of [`diamond_forward`].
#[inline]
pub fn diamond_backward(phi_n: f64, phi_e: f64, phi_w: f64, c: &CellCoefficients, h: f64) -> f64 {
    let bar = 0.5 * (phi_e + phi_w);
    phi_e + phi_w - phi_n - 0.25 * h * h * source(c, bar)
}

impl Stencil {
    #[inline]
    fn step(self, far: f64, a: f64, b: f64, c: &CellCoefficients, h: f64) -> f64 {
        match self {
            Stencil::Standard => diamond_forward(far, a, b, c, h),
            Stencil::Broken => a + b - far - 0.25 * h * h * source(c, far),
        }
    }
}

/// Value of `(ψ̂₀, ψ̂₁)` at arbitrary `r_*`, with compact data read as zero
/// outside the sampled range.
struct DataSampler<'a> {
    psi0: CubicInterpolator<'a>,
    psi1: CubicInterpolator<'a>,
    compact: bool,
}

impl<'a> DataSampler<'a> {
    fn new(data: &'a CauchyData) -> Result<Self> {
        Ok(DataSampler {
            psi0: CubicInterpolator::new(data.rstar(), data.psi0())?,
            psi1: CubicInterpolator::new(data.rstar(), data.psi1())?,
            compact: data.is_compact(),
        })
    }

    fn read(&self, interp: &CubicInterpolator<'_>, x: f64) -> Result<f64> {
        match interp.eval(x) {
            Some(v) => Ok(v),
            None if self.compact => Ok(0.0),
            None => {
                let (lo, hi) = interp.range();
                Err(Error::Support(format!(
                    "non-compact Cauchy data sampled on [{lo}, {hi}] queried at r_* = {x}"
                )))
            }
        }
    }

    fn psi0(&self, x: f64) -> Result<f64> {
        self.read(&self.psi0, x)
    }

    fn psi1(&self, x: f64) -> Result<f64> {
        self.read(&self.psi1, x)
    }
}

/// Seed anti-diagonals `n - 1`, `n`, `n + 1` from Cauchy data:
/// `φ = ψ̂₀ + t ψ̂₁ + (t²/2)(∂²ψ̂₀ - V ψ̂₀ - κ q ψ̂₀³)`.
pub fn init_band_from_cauchy(data: &CauchyData, grid: &NullGrid) -> Result<GridField> {
    if data.mode() != grid.mode() {
        return Err(Error::config("Cauchy data and grid carry different modes"));
    }
    let sampler = DataSampler::new(data)?;
    let n = grid.n();
    let h = grid.h();
    let delta = 0.5 * h;
    let mut field = GridField::empty(grid.clone());
    for k in n - 1..=n + 1 {
        let t = (k as f64 - n as f64) * 0.5 * h;
        for (i, j) in crate::fields::diagonal_nodes(n, k) {
            let geo = grid.geometry(i, j);
            let x = geo.rstar;
            let p0 = sampler.psi0(x)?;
            let value = if t == 0.0 {
                p0
            } else {
                let p1 = sampler.psi1(x)?;
                let d2 = (sampler.psi0(x + delta)? - 2.0 * p0 + sampler.psi0(x - delta)?)
                    / (delta * delta);
                let accel = d2 - geo.potential * p0 - geo.coupling * p0 * p0 * p0;
                p0 + t * p1 + 0.5 * t * t * accel
            };
            field.set(i, j, value);
        }
    }
    Ok(field)
}

fn require_bands(field: &GridField, bands: std::ops::RangeInclusive<usize>) -> Result<()> {
    let n = field.grid().n();
    for k in bands {
        for (i, j) in crate::fields::diagonal_nodes(n, k) {
            if !field.is_valid(i, j) {
                return Err(Error::MaskIncomplete(format!(
                    "seed band {k} lacks node ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

fn checked(value: f64, i: usize, j: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evolution { i, j })
    }
}

/// Fill anti-diagonals `k_min..=k_max` above the valid bands by forward steps,
/// row by row. Rows respect the cell dependencies and reproduce the
/// anti-diagonal ordering bit for bit.
fn march_forward(field: &mut GridField, k_min: usize, k_max: usize, stencil: Stencil) -> Result<()> {
    let grid = field.grid().clone();
    let n = grid.n();
    let h = grid.h();
    let side = grid.side();
    for i in 1..=n {
        for j in 1..=n {
            let k = i + j;
            if k < k_min || k > k_max {
                continue;
            }
            let c = CellCoefficients::from(grid.geometry(i, j));
            let (values, _) = field.raw();
            let s = values[(i - 1) * side + j - 1];
            let e = values[(i - 1) * side + j];
            let w = values[i * side + j - 1];
            let value = checked(stencil.step(s, e, w, &c, h), i, j)?;
            field.set(i, j, value);
        }
    }
    Ok(())
}

/// Fill anti-diagonals `k_min..=k_max` below the valid bands by backward
/// steps, in reverse row order.
fn march_backward(field: &mut GridField, k_min: usize, k_max: usize, stencil: Stencil) -> Result<()> {
    let grid = field.grid().clone();
    let n = grid.n();
    let h = grid.h();
    let side = grid.side();
    for a in (0..n).rev() {
        for b in (0..n).rev() {
            let k = a + b;
            if k < k_min || k > k_max {
                continue;
            }
            let c = CellCoefficients::from(grid.geometry(a, b));
            let (values, _) = field.raw();
            let north = values[(a + 1) * side + b + 1];
            let e = values[a * side + b + 1];
            let w = values[(a + 1) * side + b];
            let value = checked(stencil.step(north, e, w, &c, h), a, b)?;
            field.set(a, b, value);
        }
    }
    Ok(())
}

/// Future development of a seeded field: one backward step fills
/// anti-diagonal `n - 2`, then forward marching fills `n + 2 ..= 2n`.
pub fn evolve_from_seed(mut field: GridField, stencil: Stencil) -> Result<GridField> {
    let n = field.grid().n();
    require_bands(&field, n - 1..=n + 1)?;
    march_backward(&mut field, n - 2, n - 2, stencil)?;
    march_forward(&mut field, n + 2, 2 * n, stencil)?;
    Ok(field)
}

/// Past development of a seeded field: one forward step fills
/// anti-diagonal `n + 2`, then backward marching fills `0 ..= n - 2`.
pub fn evolve_past_from_seed(mut field: GridField, stencil: Stencil) -> Result<GridField> {
    let n = field.grid().n();
    require_bands(&field, n - 1..=n + 1)?;
    march_forward(&mut field, n + 2, n + 2, stencil)?;
    march_backward(&mut field, 0, n - 2, stencil)?;
    Ok(field)
}

/// Solve the Cauchy problem on the future triangle `t >= 0` (plus the two
/// bands below it needed for time derivatives at `t = 0`).
pub fn evolve_forward(data: &CauchyData, grid: &NullGrid) -> Result<GridField> {
    evolve_forward_with(data, grid, Stencil::Standard)
}

pub fn evolve_forward_with(data: &CauchyData, grid: &NullGrid, stencil: Stencil) -> Result<GridField> {
    evolve_from_seed(init_band_from_cauchy(data, grid)?, stencil)
}

/// Solve the Cauchy problem on the past triangle `t <= 0`.
pub fn evolve_past(data: &CauchyData, grid: &NullGrid) -> Result<GridField> {
    evolve_past_from_seed(init_band_from_cauchy(data, grid)?, Stencil::Standard)
}

fn check_edge(trace: &EdgeTrace, grid: &NullGrid, coord: impl Fn(usize) -> f64, name: &str) -> Result<()> {
    if trace.len() != grid.side() {
        return Err(Error::config(format!(
            "{name} edge has {} samples, grid needs {}",
            trace.len(),
            grid.side()
        )));
    }
    let tol = 1e-9 * grid.h();
    for (k, c) in trace.coords.iter().enumerate() {
        if (c - coord(k)).abs() > tol {
            return Err(Error::config(format!(
                "{name} edge coordinate {k} is {c}, grid node sits at {}",
                coord(k)
            )));
        }
    }
    Ok(())
}

/// Solve the characteristic problem from a pair of null edges.
///
/// Future data (`u = u_max`, `v = v_max`) are marched backward down to
/// anti-diagonal `n - 2`; past data (`v = v_min`, `u = u_min`) are marched
/// forward up to anti-diagonal `n + 2`.
pub fn evolve_goursat(bdata: &BoundaryData, grid: &NullGrid) -> Result<GridField> {
    if bdata.mode() != grid.mode() {
        return Err(Error::config("boundary data and grid carry different modes"));
    }
    let n = grid.n();
    let mut field = GridField::empty(grid.clone());
    match bdata.side() {
        BoundarySide::Future => {
            check_edge(bdata.horizon(), grid, |j| grid.v(j), "horizon")?;
            check_edge(bdata.infinity(), grid, |i| grid.u(i), "null infinity")?;
            for j in 0..=n {
                field.set(n, j, bdata.horizon().values[j]);
            }
            for i in 0..n {
                field.set(i, n, bdata.infinity().values[i]);
            }
            march_backward(&mut field, n - 2, 2 * n, Stencil::Standard)?;
        }
        BoundarySide::Past => {
            check_edge(bdata.horizon(), grid, |i| grid.u(i), "past horizon")?;
            check_edge(bdata.infinity(), grid, |j| grid.v(j), "past null infinity")?;
            for i in 0..=n {
                field.set(i, 0, bdata.horizon().values[i]);
            }
            for j in 1..=n {
                field.set(0, j, bdata.infinity().values[j]);
            }
            march_forward(&mut field, 0, n + 2, Stencil::Standard)?;
        }
    }
    Ok(field)
}

/// Values on the future edges: `ξ(v)` along `u = u_max` and `ζ(u)` along
/// `v = v_max`, with second-order tangential derivatives.
pub fn extract_radiation(field: &GridField) -> Result<BoundaryData> {
    let grid = field.grid();
    let n = grid.n();
    let edge = |node: &dyn Fn(usize) -> (usize, usize), coord: &dyn Fn(usize) -> f64, name: &str| {
        let mut coords = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let (i, j) = node(k);
            let value = field.get(i, j).ok_or_else(|| {
                Error::MaskIncomplete(format!("{name} edge node ({i}, {j}) not computed"))
            })?;
            coords.push(coord(k));
            values.push(value);
        }
        EdgeTrace::new(coords, values)
    };
    let horizon = edge(&|j| (n, j), &|j| grid.v(j), "horizon")?;
    let infinity = edge(&|i| (i, n), &|i| grid.u(i), "null infinity")?;
    BoundaryData::new(BoundarySide::Future, horizon, infinity, *grid.mode())
}

/// Values on the past edges: along `v = v_min` indexed by `u` and along
/// `u = u_min` indexed by `v`.
pub fn extract_past_radiation(field: &GridField) -> Result<BoundaryData> {
    let grid = field.grid();
    let n = grid.n();
    let collect = |node: &dyn Fn(usize) -> (usize, usize), coord: &dyn Fn(usize) -> f64, name: &str| {
        let mut coords = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let (i, j) = node(k);
            let value = field.get(i, j).ok_or_else(|| {
                Error::MaskIncomplete(format!("{name} edge node ({i}, {j}) not computed"))
            })?;
            coords.push(coord(k));
            values.push(value);
        }
        EdgeTrace::new(coords, values)
    };
    let horizon = collect(&|i| (i, 0), &|i| grid.u(i), "past horizon")?;
    let infinity = collect(&|j| (0, j), &|j| grid.v(j), "past null infinity")?;
    BoundaryData::new(BoundarySide::Past, horizon, infinity, *grid.mode())
}

/// `∂_t φ` at node `(i, j)` from one-sided null differences, used where the
/// symmetric time difference reaches off the lattice.
fn time_derivative_fallback(field: &GridField, i: usize, j: usize) -> Option<f64> {
    Some(field.du(i, j)? + field.dv(i, j)?)
}

/// Read `(ψ̂₀, ψ̂₁)` back from the `t = 0` anti-diagonal, with
/// `ψ̂₁ = (φ(t + h) - φ(t - h))/(2h)` wherever both neighbours exist.
pub fn restrict_to_cauchy(field: &GridField) -> Result<CauchyData> {
    let grid = field.grid();
    let n = grid.n();
    let h = grid.h();
    let mut rstar = Vec::with_capacity(n + 1);
    let mut psi0 = Vec::with_capacity(n + 1);
    let mut psi1 = Vec::with_capacity(n + 1);
    for i in (0..=n).rev() {
        let j = n - i;
        let p0 = field.get(i, j).ok_or_else(|| {
            Error::MaskIncomplete(format!("t = 0 node ({i}, {j}) not computed"))
        })?;
        let central = (i > 0 && j > 0 && i < n && j < n)
            .then(|| Some((field.get(i + 1, j + 1)? - field.get(i - 1, j - 1)?) / (2.0 * h)))
            .flatten();
        let p1 = central
            .or_else(|| time_derivative_fallback(field, i, j))
            .ok_or_else(|| {
                Error::MaskIncomplete(format!("no time derivative available at ({i}, {j})"))
            })?;
        rstar.push(grid.rstar(i, j));
        psi0.push(p0);
        psi1.push(p1);
    }
    CauchyData::new(rstar, psi0, psi1, *grid.mode())
}

/// Image of a field under `(u, v) → (-v, -u)`, i.e. `t → -t`: node `(i, j)`
/// moves to `(n - j, n - i)`.
pub fn reflect_field(field: &GridField) -> GridField {
    let grid = field.grid().clone();
    let n = grid.n();
    let mut out = GridField::empty(grid);
    for i in 0..=n {
        for j in 0..=n {
            if let Some(x) = field.get(i, j) {
                out.set(n - j, n - i, x);
            }
        }
    }
    out
}
