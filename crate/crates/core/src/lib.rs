//! Numerical laboratory for conformal scattering of the defocusing cubic
//! wave equation `□_g ψ + ψ³ = 0` on the Schwarzschild exterior.
//!
//! The unknown is the conformally rescaled field `ψ̂ = rψ`, reduced to a
//! single spherical-harmonic mode `φ(u, v)` on a uniform double-null
//! lattice. The same explicit diamond stencil drives the forward Cauchy
//! problem and, run in reverse, the characteristic (Goursat) problem, so
//! the trace operator and its inverse are exact algebraic inverses on the
//! lattice.
//!
//! Module map:
//!
//! * [`background`]: metric function, tortoise coordinate, `λ` slicing.
//! * [`fields`]: lattice, geometry caches, field and data containers.
//! * [`evolve`]: diamond stencil, forward/backward/characteristic marching.
//! * [`energy`]: energy fluxes through every hypersurface and the closure audit.
//! * [`scattering`]: trace operators, scattering map, Lipschitz probes.
//! * [`analysis`]: decay fits, Sobolev probe, inequality audit, convergence.
//! * [`io`]: CSV artifacts.

pub mod analysis;
pub mod background;
pub mod energy;
pub mod error;
pub mod evolve;
pub mod fields;
pub mod io;
pub mod numerics;
pub mod scattering;

pub use background::{null_coords, time_and_rstar, BlackHoleParams, LambdaProfile, LambdaValue};

pub use energy::{ClosureAudit, EnergyBreakdown, SliceEnergy};
pub use error::{Error, Result};
pub use evolve::{diamond_backward, diamond_forward, CellCoefficients, Stencil};
pub use fields::{
    AngularConvention, Background, BoundaryData, BoundarySide, CauchyData, Dynamics, EdgeTrace,
    GaussianPulse, GridField, ModeSpec, NodeGeometry, NullGrid, PulseKind,
};
pub use scattering::ScatteringReport;
