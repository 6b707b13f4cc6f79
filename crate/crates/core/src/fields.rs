//! Double-null lattice, mode conventions, and the field / data containers.
//!
//! Node `(i, j)` sits at `u_i = u_min + i·h`, `v_j = v_min + j·h` with
//! `0 <= i, j <= n`. The lattice is square (`Δu = Δv = h`) and its `t = 0`
//! anti-diagonal `i + j = n` runs corner to corner, so anti-diagonal `k`
//! carries time `t = (k - n)·h/2` and node `(i, j)` sits at
//! `r_* = (v_min - u_min)/2 + (j - i)·h/2`.

use std::f64::consts::PI;

use crate::background::BlackHoleParams;
use crate::error::{Error, Result};
use crate::numerics::gradient;

/// How the angular integral `∫ d²ω` of a single mode is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngularConvention {
    /// `ψ̂` independent of angle; the sphere contributes its area `4π`.
    SphericallySymmetric,
    /// Unit-normalised spherical harmonic; the sphere contributes `1`.
    NormalizedHarmonic,
}

/// Spherical-harmonic sector evolved by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeSpec {
    l: u32,
    nonlinear: bool,
    convention: AngularConvention,
}

impl ModeSpec {
    pub fn new(l: u32, nonlinear: bool, convention: AngularConvention) -> Result<Self> {
        if nonlinear && (l != 0 || convention != AngularConvention::SphericallySymmetric) {
            return Err(Error::config(
                "the cubic term only closes on the spherically symmetric l = 0 sector",
            ));
        }
        Ok(ModeSpec {
            l,
            nonlinear,
            convention,
        })
    }

    /// `l = 0`, cubic nonlinearity switched on.
    pub fn spherical_nonlinear() -> Self {
        ModeSpec {
            l: 0,
            nonlinear: true,
            convention: AngularConvention::SphericallySymmetric,
        }
    }

    pub fn spherical_linear() -> Self {
        ModeSpec {
            l: 0,
            nonlinear: false,
            convention: AngularConvention::SphericallySymmetric,
        }
    }

    pub fn harmonic(l: u32) -> Self {
        ModeSpec {
            l,
            nonlinear: false,
            convention: AngularConvention::NormalizedHarmonic,
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    pub fn convention(&self) -> AngularConvention {
        self.convention
    }

    /// `A_l`: `4π` or `1`.
    pub fn angular_factor(&self) -> f64 {
        match self.convention {
            AngularConvention::SphericallySymmetric => 4.0 * PI,
            AngularConvention::NormalizedHarmonic => 1.0,
        }
    }

    /// `G_l = l(l+1)`, the eigenvalue of `-Δ_{S²}`.
    pub fn gradient_factor(&self) -> f64 {
        let l = self.l as f64;
        l * (l + 1.0)
    }

    /// `κ`: 1 with the cubic term, 0 without.
    pub fn kappa(&self) -> f64 {
        if self.nonlinear {
            1.0
        } else {
            0.0
        }
    }
}

/// Which equation the lattice carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamics {
    Schwarzschild,
    /// The `M → 0` limit: potential, nonlinear coupling and every `R`-weighted
    /// flux term switched off. Coordinates and slicing still come from the
    /// black-hole parameters so the same surfaces can be audited.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Background {
    pub params: BlackHoleParams,
    pub dynamics: Dynamics,
}

/// Geometry and equation coefficients at one value of `r_*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGeometry {
    pub rstar: f64,
    /// `r - 2M`, resolved even where `r` itself rounds to `2M`.
    pub excess: f64,
    pub r: f64,
    pub f: f64,
    /// `V_l = F (l(l+1)/r² + 2M/r³)`.
    pub potential: f64,
    /// `κ F / r²`, multiplying `φ³` in the equation.
    pub coupling: f64,
    /// `R² F` as it enters flux densities (zero for flat dynamics).
    pub r2f: f64,
    /// `2MR` as it enters the `ℋ` norm (zero for flat dynamics).
    pub two_m_r: f64,
}

impl NodeGeometry {
    /// Potential energy density `U = ½ V φ² + ¼ κ (F/r²) φ⁴`.
    #[inline]
    pub fn potential_density(&self, phi: f64) -> f64 {
        let p2 = phi * phi;
        0.5 * self.potential * p2 + 0.25 * self.coupling * p2 * p2
    }
}

impl Background {
    pub fn schwarzschild(params: BlackHoleParams) -> Self {
        Background {
            params,
            dynamics: Dynamics::Schwarzschild,
        }
    }

    pub fn flat(params: BlackHoleParams) -> Self {
        Background {
            params,
            dynamics: Dynamics::Flat,
        }
    }

    pub fn geometry(&self, rstar: f64, mode: &ModeSpec) -> Result<NodeGeometry> {
        let m = self.params.mass();
        let excess = self.params.excess_of_rstar(rstar)?;
        let r = 2.0 * m + excess;
        let f = excess / r;
        let inv_r = 1.0 / r;
        let mut g = NodeGeometry {
            rstar,
            excess,
            r,
            f,
            potential: 0.0,
            coupling: 0.0,
            r2f: 0.0,
            two_m_r: 0.0,
        };
        if self.dynamics == Dynamics::Schwarzschild {
            let inv_r2 = inv_r * inv_r;
            g.potential = f * inv_r2 * (mode.gradient_factor() + 2.0 * m * inv_r);
            g.coupling = mode.kappa() * f * inv_r2;
            g.r2f = f * inv_r2;
            g.two_m_r = 2.0 * m * inv_r;
        }
        Ok(g)
    }
}

/// Uniform double-null lattice with per-node geometry caches.
#[derive(Debug, Clone, PartialEq)]
pub struct NullGrid {
    u_min: f64,
    u_max: f64,
    v_min: f64,
    v_max: f64,
    n: usize,
    h: f64,
    background: Background,
    mode: ModeSpec,
    /// Indexed by `j - i + n`; geometry depends on `r_*` alone.
    geometry: Vec<NodeGeometry>,
}

pub const MIN_CELLS: usize = 8;

/// Schwarzschild lattice with `u_min = -v_max`, `v_min = -u_max`.
pub fn make_grid(
    u_max: f64,
    v_max: f64,
    n: usize,
    params: &BlackHoleParams,
    mode: ModeSpec,
) -> Result<NullGrid> {
    NullGrid::new(u_max, v_max, n, Background::schwarzschild(*params), mode)
}

/// Lattice carrying the flat-space limit of the equation.
pub fn make_flat_grid(
    u_max: f64,
    v_max: f64,
    n: usize,
    params: &BlackHoleParams,
    mode: ModeSpec,
) -> Result<NullGrid> {
    NullGrid::new(u_max, v_max, n, Background::flat(*params), mode)
}

impl NullGrid {
    pub fn new(
        u_max: f64,
        v_max: f64,
        n: usize,
        background: Background,
        mode: ModeSpec,
    ) -> Result<Self> {
        if !(u_max.is_finite() && v_max.is_finite()) || u_max <= -v_max {
            return Err(Error::config(format!(
                "grid extent requires u_max > -v_max, got u_max={u_max}, v_max={v_max}"
            )));
        }
        if n < MIN_CELLS {
            return Err(Error::config(format!(
                "grid needs n >= {MIN_CELLS} cells per axis, got n={n}"
            )));
        }
        let u_min = -v_max;
        let v_min = -u_max;
        let h = (u_max - u_min) / n as f64;
        let rstar_offset = 0.5 * (v_min - u_min);
        let geometry = (0..=2 * n)
            .map(|d| {
                let rstar = rstar_offset + (d as f64 - n as f64) * 0.5 * h;
                background.geometry(rstar, &mode)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NullGrid {
            u_min,
            u_max,
            v_min,
            v_max,
            n,
            h,
            background,
            mode,
            geometry,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nodes per axis, `n + 1`.
    pub fn side(&self) -> usize {
        self.n + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn u_range(&self) -> (f64, f64) {
        (self.u_min, self.u_max)
    }

    pub fn v_range(&self) -> (f64, f64) {
        (self.v_min, self.v_max)
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    pub fn params(&self) -> &BlackHoleParams {
        &self.background.params
    }

    pub fn mode(&self) -> &ModeSpec {
        &self.mode
    }

    pub fn is_flat(&self) -> bool {
        self.background.dynamics == Dynamics::Flat
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    #[inline]
    pub fn u(&self, i: usize) -> f64 {
        self.u_min + i as f64 * self.h
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        self.v_min + j as f64 * self.h
    }

    #[inline]
    pub fn t(&self, i: usize, j: usize) -> f64 {
        (i as f64 + j as f64 - self.n as f64) * 0.5 * self.h
    }

    #[inline]
    pub fn rstar(&self, i: usize, j: usize) -> f64 {
        self.geometry(i, j).rstar
    }

    /// Geometry at node `(i, j)`; also the geometry at the centre of the
    /// cell whose north corner is `(i, j)`.
    #[inline]
    pub fn geometry(&self, i: usize, j: usize) -> &NodeGeometry {
        &self.geometry[j + self.n - i]
    }

    /// `r_*` range of the `t = 0` slice, `[-u_max, v_max]`.
    pub fn cauchy_range(&self) -> (f64, f64) {
        (self.rstar(self.n, 0), self.rstar(0, self.n))
    }

    /// Fractional lattice coordinate of `u`: `(cell, offset)` with
    /// `0 <= cell < n` and `offset ∈ [0, 1]`. `None` outside the lattice.
    pub fn locate_u(&self, u: f64) -> Option<(usize, f64)> {
        self.locate((u - self.u_min) / self.h)
    }

    pub fn locate_v(&self, v: f64) -> Option<(usize, f64)> {
        self.locate((v - self.v_min) / self.h)
    }

    fn locate(&self, s: f64) -> Option<(usize, f64)> {
        let slack = 1e-9;
        let n = self.n as f64;
        if !(s >= -slack && s <= n + slack) {
            return None;
        }
        let s = s.clamp(0.0, n);
        let cell = (s.floor() as usize).min(self.n - 1);
        Some((cell, s - cell as f64))
    }
}

/// Samples `φ(u_i, v_j)` of the mode-reduced rescaled field `ψ̂ = rψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: NullGrid,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl GridField {
    /// No node computed yet.
    pub fn empty(grid: NullGrid) -> Self {
        let len = grid.side() * grid.side();
        GridField {
            grid,
            values: vec![0.0; len],
            mask: vec![false; len],
        }
    }

    pub fn grid(&self) -> &NullGrid {
        &self.grid
    }

    pub fn mode(&self) -> &ModeSpec {
        self.grid.mode()
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        i <= self.grid.n && j <= self.grid.n && self.mask[self.grid.index(i, j)]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.is_valid(i, j)
            .then(|| self.values[self.grid.index(i, j)])
    }

    /// Unchecked read; the node must be valid.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        debug_assert!(self.is_valid(i, j), "read of uncomputed node ({i}, {j})");
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = value;
        self.mask[k] = true;
    }

    /// Assign `f(u, v)` on every node of anti-diagonal `k = i + j`.
    pub fn seed_diagonal(&mut self, k: usize, mut f: impl FnMut(f64, f64) -> f64) {
        for (i, j) in diagonal_nodes(self.grid.n, k) {
            let (u, v) = (self.grid.u(i), self.grid.v(j));
            self.set(i, j, f(u, v));
        }
    }

    /// Second-order `∂_u φ` at a node: central where both neighbours are
    /// computed, three-point one-sided otherwise.
    pub fn du(&self, i: usize, j: usize) -> Option<f64> {
        self.derivative(i, |k| self.get(k, j))
    }

    /// Second-order `∂_v φ` at a node.
    pub fn dv(&self, i: usize, j: usize) -> Option<f64> {
        self.derivative(j, |k| self.get(i, k))
    }

    fn derivative(&self, k: usize, at: impl Fn(usize) -> Option<f64>) -> Option<f64> {
        let h = self.grid.h;
        let n = self.grid.n;
        let here = at(k)?;
        if k > 0 && k < n {
            if let (Some(a), Some(b)) = (at(k - 1), at(k + 1)) {
                return Some((b - a) / (2.0 * h));
            }
        }
        if k + 2 <= n {
            if let (Some(a), Some(b)) = (at(k + 1), at(k + 2)) {
                return Some((-3.0 * here + 4.0 * a - b) / (2.0 * h));
            }
        }
        if k >= 2 {
            if let (Some(a), Some(b)) = (at(k - 1), at(k - 2)) {
                return Some((3.0 * here - 4.0 * a + b) / (2.0 * h));
            }
        }
        None
    }

    /// Number of computed nodes.
    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, m)| **m)
            .fold(0.0, |acc, (v, _)| acc.max(v.abs()))
    }

    /// Maximum of `|φ|` over anti-diagonals `k` in `range`.
    pub fn max_abs_on_diagonals(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        let mut best: f64 = 0.0;
        for k in range {
            for (i, j) in diagonal_nodes(self.grid.n, k) {
                if let Some(x) = self.get(i, j) {
                    best = best.max(x.abs());
                }
            }
        }
        best
    }

    /// First non-finite computed value, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        let side = self.grid.side();
        self.values
            .iter()
            .zip(&self.mask)
            .position(|(v, m)| *m && !v.is_finite())
            .map(|k| (k / side, k % side))
    }

    pub(crate) fn raw(&self) -> (&[f64], &[bool]) {
        (&self.values, &self.mask)
    }
}

/// Nodes `(i, j)` of anti-diagonal `i + j = k` inside a lattice with `n` cells.
pub fn diagonal_nodes(n: usize, k: usize) -> impl Iterator<Item = (usize, usize)> {
    let lo = k.saturating_sub(n);
    let hi = k.min(n);
    (lo..=hi).filter(move |_| k <= 2 * n).map(move |i| (i, k - i))
}

/// Data `(ψ̂₀, ψ̂₁) = (ψ̂, ∂_t ψ̂)` on the `t = 0` slice.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    rstar: Vec<f64>,
    psi0: Vec<f64>,
    psi1: Vec<f64>,
    mode: ModeSpec,
}

impl CauchyData {
    pub fn new(rstar: Vec<f64>, psi0: Vec<f64>, psi1: Vec<f64>, mode: ModeSpec) -> Result<Self> {
        if rstar.len() != psi0.len() || rstar.len() != psi1.len() {
            return Err(Error::config(format!(
                "Cauchy arrays differ in length: {}, {}, {}",
                rstar.len(),
                psi0.len(),
                psi1.len()
            )));
        }
        if rstar.len() < 3 {
            return Err(Error::config("Cauchy data needs at least 3 samples"));
        }
        if rstar.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("Cauchy samples must be strictly increasing in r_*"));
        }
        if rstar
            .iter()
            .chain(&psi0)
            .chain(&psi1)
            .any(|x| !x.is_finite())
        {
            return Err(Error::config("Cauchy data contains non-finite values"));
        }
        Ok(CauchyData {
            rstar,
            psi0,
            psi1,
            mode,
        })
    }

    pub fn zeros(rstar: Vec<f64>, mode: ModeSpec) -> Result<Self> {
        let n = rstar.len();
        CauchyData::new(rstar, vec![0.0; n], vec![0.0; n], mode)
    }

    pub fn rstar(&self) -> &[f64] {
        &self.rstar
    }

    pub fn psi0(&self) -> &[f64] {
        &self.psi0
    }

    pub fn psi1(&self) -> &[f64] {
        &self.psi1
    }

    pub fn mode(&self) -> &ModeSpec {
        &self.mode
    }

    pub fn len(&self) -> usize {
        self.rstar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rstar.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.psi0
            .iter()
            .chain(&self.psi1)
            .fold(0.0, |a: f64, x| a.max(x.abs()))
    }

    /// Both arrays vanish at both ends (to `1e-14` of their peak).
    pub fn is_compact(&self) -> bool {
        let floor = 1e-14 * self.max_abs();
        let last = self.len() - 1;
        [self.psi0[0], self.psi0[last], self.psi1[0], self.psi1[last]]
            .iter()
            .all(|x| x.abs() <= floor)
    }

    /// `(ψ̂₀ - other.ψ̂₀, ψ̂₁ - other.ψ̂₁)` on identical samples.
    pub fn difference(&self, other: &CauchyData) -> Result<CauchyData> {
        if self.rstar.len() != other.rstar.len()
            || self
                .rstar
                .iter()
                .zip(&other.rstar)
                .any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(1.0))
        {
            return Err(Error::config("Cauchy data sampled on different r_* points"));
        }
        let d0 = self.psi0.iter().zip(&other.psi0).map(|(a, b)| a - b).collect();
        let d1 = self.psi1.iter().zip(&other.psi1).map(|(a, b)| a - b).collect();
        CauchyData::new(self.rstar.clone(), d0, d1, self.mode)
    }

    /// `(a·ψ̂₀, b·ψ̂₁)`.
    pub fn scaled(&self, a: f64, b: f64) -> CauchyData {
        CauchyData {
            rstar: self.rstar.clone(),
            psi0: self.psi0.iter().map(|x| a * x).collect(),
            psi1: self.psi1.iter().map(|x| b * x).collect(),
            mode: self.mode,
        }
    }

    /// Same samples, `ψ̂₁ → -ψ̂₁` (time reflection).
    pub fn time_reversed(&self) -> CauchyData {
        self.scaled(1.0, -1.0)
    }

    /// Pointwise sum on identical samples.
    pub fn sum(&self, other: &CauchyData) -> Result<CauchyData> {
        let neg = other.scaled(-1.0, -1.0);
        self.difference(&neg)
    }
}

/// Which pair of null boundaries carries the radiation data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    /// `u = u_max` (horizon proxy, indexed by `v`) and `v = v_max`
    /// (null-infinity proxy, indexed by `u`).
    Future,
    /// `v = v_min` (past horizon proxy, indexed by `u`) and `u = u_min`
    /// (past null-infinity proxy, indexed by `v`).
    Past,
}

/// Values of `φ` along one null edge with their tangential derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrace {
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    /// Second-order tangential derivative.
    pub slopes: Vec<f64>,
}

impl EdgeTrace {
    pub fn new(coords: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if coords.len() != values.len() || coords.len() < 3 {
            return Err(Error::config(format!(
                "edge trace needs >= 3 paired samples, got {} and {}",
                coords.len(),
                values.len()
            )));
        }
        if coords.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("edge coordinates must be strictly increasing"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("edge values must be finite"));
        }
        let slopes = gradient(&coords, &values);
        Ok(EdgeTrace {
            coords,
            values,
            slopes,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a: f64, x| a.max(x.abs()))
    }
}

/// Radiation (scattering) data on a pair of null edges.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    side: BoundarySide,
    /// `ξ`: the horizon-side edge.
    horizon: EdgeTrace,
    /// `ζ`: the null-infinity-side edge.
    infinity: EdgeTrace,
    mode: ModeSpec,
}

impl BoundaryData {
    pub fn new(
        side: BoundarySide,
        horizon: EdgeTrace,
        infinity: EdgeTrace,
        mode: ModeSpec,
    ) -> Result<Self> {
        let (h, z) = match side {
            BoundarySide::Future => (horizon.values[horizon.len() - 1], infinity.values[infinity.len() - 1]),
            BoundarySide::Past => (horizon.values[0], infinity.values[0]),
        };
        let scale = horizon.max_abs().max(infinity.max_abs()).max(1e-300);
        if (h - z).abs() > 1e-12 * scale {
            return Err(Error::CornerMismatch {
                horizon: h,
                infinity: z,
            });
        }
        Ok(BoundaryData {
            side,
            horizon,
            infinity,
            mode,
        })
    }

    pub fn side(&self) -> BoundarySide {
        self.side
    }

    pub fn horizon(&self) -> &EdgeTrace {
        &self.horizon
    }

    pub fn infinity(&self) -> &EdgeTrace {
        &self.infinity
    }

    pub fn mode(&self) -> &ModeSpec {
        &self.mode
    }

    pub fn max_abs(&self) -> f64 {
        self.horizon.max_abs().max(self.infinity.max_abs())
    }

    /// Pointwise difference on identical edge samples.
    pub fn difference(&self, other: &BoundaryData) -> Result<BoundaryData> {
        fn sub(a: &EdgeTrace, b: &EdgeTrace) -> Result<EdgeTrace> {
            if a.len() != b.len() {
                return Err(Error::config("edge traces differ in length"));
            }
            EdgeTrace::new(
                a.coords.clone(),
                a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect(),
            )
        }
        if self.side != other.side {
            return Err(Error::config("cannot subtract past and future radiation data"));
        }
        Ok(BoundaryData {
            side: self.side,
            horizon: sub(&self.horizon, &other.horizon)?,
            infinity: sub(&self.infinity, &other.infinity)?,
            mode: self.mode,
        })
    }

    /// Image under `(u, v) → (-v, -u)`, which exchanges past and future
    /// edges of the same lattice.
    pub fn reflected(&self) -> Result<BoundaryData> {
        fn flip(e: &EdgeTrace) -> Result<EdgeTrace> {
            EdgeTrace::new(
                e.coords.iter().rev().map(|c| -c).collect(),
                e.values.iter().rev().copied().collect(),
            )
        }
        let side = match self.side {
            BoundarySide::Future => BoundarySide::Past,
            BoundarySide::Past => BoundarySide::Future,
        };
        Ok(BoundaryData {
            side,
            horizon: flip(&self.horizon)?,
            infinity: flip(&self.infinity)?,
            mode: self.mode,
        })
    }
}

/// Shape of the time derivative attached to a Gaussian profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    /// `ψ̂₁ = 0`.
    TimeSymmetric,
    /// `ψ̂₁ = -∂_{r_*} ψ̂₀`: moves toward larger `r_*`.
    Outgoing,
    /// `ψ̂₁ = +∂_{r_*} ψ̂₀`: moves toward the horizon.
    Ingoing,
}

/// `ψ̂₀(r_*) = A exp(-(r_* - c)²/w²)`, cut to zero outside `c ± 5w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub kind: PulseKind,
}

impl GaussianPulse {
    pub const CUTOFF_WIDTHS: f64 = 5.0;

    pub fn new(amplitude: f64, center: f64, width: f64, kind: PulseKind) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) || !amplitude.is_finite() || !center.is_finite() {
            return Err(Error::config(format!(
                "Gaussian pulse needs finite amplitude/center and positive width, got A={amplitude}, c={center}, w={width}"
            )));
        }
        Ok(GaussianPulse {
            amplitude,
            center,
            width,
            kind,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        let half = Self::CUTOFF_WIDTHS * self.width;
        (self.center - half, self.center + half)
    }

    pub fn psi0(&self, x: f64) -> f64 {
        let d = x - self.center;
        if d.abs() > Self::CUTOFF_WIDTHS * self.width {
            0.0
        } else {
            self.amplitude * (-(d * d) / (self.width * self.width)).exp()
        }
    }

    pub fn dpsi0(&self, x: f64) -> f64 {
        let d = x - self.center;
        -2.0 * d / (self.width * self.width) * self.psi0(x)
    }

    pub fn psi1(&self, x: f64) -> f64 {
        match self.kind {
            PulseKind::TimeSymmetric => 0.0,
            PulseKind::Outgoing => -self.dpsi0(x),
            PulseKind::Ingoing => self.dpsi0(x),
        }
    }

    /// Samples at the given increasing `r_*` points.
    pub fn sample(&self, rstar: &[f64], mode: ModeSpec) -> Result<CauchyData> {
        let psi0 = rstar.iter().map(|&x| self.psi0(x)).collect();
        let psi1 = rstar.iter().map(|&x| self.psi1(x)).collect();
        CauchyData::new(rstar.to_vec(), psi0, psi1, mode)
    }

    /// Samples at the `r_*` values of the lattice's `t = 0` nodes.
    pub fn sample_on_grid(&self, grid: &NullGrid) -> Result<CauchyData> {
        let (lo, hi) = grid.cauchy_range();
        let (a, b) = self.support();
        if !(a > lo && b < hi) {
            return Err(Error::Support(format!(
                "pulse support [{a}, {b}] not inside the t = 0 slice [{lo}, {hi}]"
            )));
        }
        let n = grid.n();
        let rstar: Vec<f64> = (0..=n).rev().map(|i| grid.rstar(i, n - i)).collect();
        self.sample(&rstar, *grid.mode())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BlackHoleParams {
        BlackHoleParams::unit_mass()
    }

    #[test]
    fn mode_invariants() {
        assert!(ModeSpec::new(1, true, AngularConvention::SphericallySymmetric).is_err());
        assert!(ModeSpec::new(0, true, AngularConvention::NormalizedHarmonic).is_err());
        let m = ModeSpec::new(0, true, AngularConvention::SphericallySymmetric).unwrap();
        assert_eq!(m.angular_factor(), 4.0 * PI);
        assert_eq!(m.gradient_factor(), 0.0);
        assert_eq!(m.kappa(), 1.0);
        let h = ModeSpec::harmonic(2);
        assert_eq!(h.angular_factor(), 1.0);
        assert_eq!(h.gradient_factor(), 6.0);
        assert_eq!(h.kappa(), 0.0);
    }

    #[test]
    fn grid_examples() {
        let g = make_grid(40.0, 40.0, 8, &unit(), ModeSpec::spherical_linear()).unwrap();
        assert_eq!(g.h(), 10.0);
        assert_eq!(g.side(), 9);
        for i in 0..=8 {
            assert_eq!(g.t(i, 8 - i), 0.0);
            let (u, v) = (g.u(i), g.v(8 - i));
            assert_eq!(u + v, 0.0);
        }

        let g = make_grid(40.0, 80.0, 12, &unit(), ModeSpec::spherical_linear()).unwrap();
        assert_eq!(g.h(), 10.0);
        assert_eq!((g.u(0), g.v(12)), (-80.0, 80.0));
        assert_eq!((g.u(12), g.v(0)), (40.0, -40.0));
        assert_eq!(g.cauchy_range(), (-40.0, 80.0));
    }

    #[test]
    fn grid_rejects_bad_config() {
        let p = unit();
        let m = ModeSpec::spherical_linear();
        assert!(make_grid(40.0, 40.0, 4, &p, m).is_err());
        assert!(make_grid(-40.0, 40.0, 16, &p, m).is_err());
        assert!(make_grid(-40.0, 41.0, 16, &p, m).is_ok());
    }

    #[test]
    fn cached_potential_at_r_four() {
        // place a node exactly at r_*(4) by centring the grid there
        let p = unit();
        let rs4 = p.rstar_of_r(4.0).unwrap();
        let g = make_grid(40.0 - rs4, 40.0 + rs4, 16, &p, ModeSpec::spherical_linear()).unwrap();
        let n = g.n();
        let node = g.geometry(n / 2, n / 2);
        assert!((node.rstar - rs4).abs() < 1e-12);
        assert!((node.potential - 0.015625).abs() < 1e-12);
        assert!((node.r - 4.0).abs() < 1e-12);
        assert!((node.f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn node_geometry_is_consistent() {
        let p = unit();
        let g = make_grid(120.0, 120.0, 64, &p, ModeSpec::spherical_nonlinear()).unwrap();
        for i in 0..=g.n() {
            for j in 0..=g.n() {
                let x = 0.5 * (g.v(j) - g.u(i));
                let geo = g.geometry(i, j);
                assert!((geo.rstar - x).abs() < 1e-12);
                assert!(geo.excess > 0.0);
                assert!((p.rstar_of_excess(geo.excess).unwrap() - geo.rstar).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn grid_is_deterministic() {
        let p = unit();
        let a = make_grid(100.0, 90.0, 40, &p, ModeSpec::harmonic(1)).unwrap();
        let b = make_grid(100.0, 90.0, 40, &p, ModeSpec::harmonic(1)).unwrap();
        for (x, y) in a.geometry.iter().zip(&b.geometry) {
            assert_eq!(x.potential.to_bits(), y.potential.to_bits());
            assert_eq!(x.r.to_bits(), y.r.to_bits());
            assert_eq!(x.excess.to_bits(), y.excess.to_bits());
        }
    }

    #[test]
    fn flat_grid_has_no_potential() {
        let g = make_flat_grid(40.0, 40.0, 16, &unit(), ModeSpec::spherical_nonlinear()).unwrap();
        for i in 0..=16 {
            let geo = g.geometry(i, 3);
            assert_eq!(geo.potential, 0.0);
            assert_eq!(geo.coupling, 0.0);
            assert_eq!(geo.r2f, 0.0);
        }
    }

    #[test]
    fn gaussian_samples() {
        let mode = ModeSpec::spherical_linear();
        let zero = GaussianPulse::new(0.0, 10.0, 2.0, PulseKind::TimeSymmetric).unwrap();
        let d = zero.sample(&[0.0, 10.0, 16.0], mode).unwrap();
        assert!(d.psi0().iter().all(|x| *x == 0.0));

        let g = GaussianPulse::new(1.0, 10.0, 2.0, PulseKind::TimeSymmetric).unwrap();
        assert_eq!(g.psi0(10.0), 1.0);
        assert!((g.psi0(16.0) - (-9.0f64).exp()).abs() < 1e-16);
        assert_eq!(g.psi0(20.0 + 1e-9), 0.0);
        assert_eq!(g.psi1(12.0), 0.0);

        let out = GaussianPulse { kind: PulseKind::Outgoing, ..g };
        assert!(out.psi1(12.0) > 0.0);
    }

    #[test]
    fn gaussian_support_is_checked() {
        let grid = make_grid(20.0, 20.0, 16, &unit(), ModeSpec::spherical_linear()).unwrap();
        let g = GaussianPulse::new(1.0, 10.0, 2.0, PulseKind::TimeSymmetric).unwrap();
        assert!(matches!(g.sample_on_grid(&grid), Err(Error::Support(_))));
        let grid = make_grid(40.0, 40.0, 16, &unit(), ModeSpec::spherical_linear()).unwrap();
        let d = g.sample_on_grid(&grid).unwrap();
        assert_eq!(d.len(), 17);
        assert!(d.is_compact());
        assert_eq!(d.rstar()[0], -40.0);
        assert_eq!(d.rstar()[16], 40.0);
    }

    #[test]
    fn cauchy_validation() {
        let m = ModeSpec::spherical_linear();
        assert!(CauchyData::new(vec![0.0, 1.0], vec![0.0; 2], vec![0.0; 2], m).is_err());
        assert!(CauchyData::new(vec![0.0, 1.0, 1.0], vec![0.0; 3], vec![0.0; 3], m).is_err());
        assert!(CauchyData::new(vec![0.0, 1.0, 2.0], vec![0.0; 3], vec![0.0; 2], m).is_err());
        assert!(CauchyData::new(vec![0.0, 1.0, 2.0], vec![0.0, f64::NAN, 0.0], vec![0.0; 3], m).is_err());
        let d = CauchyData::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.5], vec![0.0; 3], m).unwrap();
        assert!(!d.is_compact());
    }

    #[test]
    fn boundary_corner_compatibility() {
        let m = ModeSpec::spherical_linear();
        let xi = EdgeTrace::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 1.0]).unwrap();
        let zeta = EdgeTrace::new(vec![0.0, 1.0, 2.0], vec![3.0, 2.0, 1.0]).unwrap();
        assert!(BoundaryData::new(BoundarySide::Future, xi.clone(), zeta.clone(), m).is_ok());
        assert!(matches!(
            BoundaryData::new(BoundarySide::Past, xi, zeta, m),
            Err(Error::CornerMismatch { .. })
        ));
    }

    #[test]
    fn diagonal_enumeration() {
        let nodes: Vec<_> = diagonal_nodes(4, 5).collect();
        assert_eq!(nodes, vec![(1, 4), (2, 3), (3, 2), (4, 1)]);
        assert_eq!(diagonal_nodes(4, 0).count(), 1);
        assert_eq!(diagonal_nodes(4, 8).count(), 1);
        assert_eq!(diagonal_nodes(4, 9).count(), 0);
    }
}
