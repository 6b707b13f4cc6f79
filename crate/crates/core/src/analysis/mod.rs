//! Run analyses: decay fits, the Sobolev probe, the two-sided energy
//! inequality audit, and convergence studies.

pub mod audit;
pub mod convergence;
pub mod decay;
pub mod sobolev;

pub use audit::{inequality_audit, AuditInputs, AuditRow, InequalityId};
pub use convergence::{convergence_study, ConvergenceFlag, ConvergenceRow, ConvergenceSetup, ConvergenceTable, Quantity};
pub use decay::{fit_energy_decay, fit_pointwise_decay, DecayFit, DecayRegion};
pub use sobolev::{sobolev_ratio, Bump, BumpFamily, SobolevSummary};
