//! Two-sided energy inequalities between the initial slice, a late slice
//! and the radiated energy.

use crate::energy::{energy_breakdown, quartic_free_energy_with, FieldProbe};
use crate::error::{Error, Result};
use crate::fields::GridField;

/// Late slice used by the audit, in units of `M`.
pub const DEFAULT_LATE_TIME: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InequalityId {
    /// `E_ℐ + E_𝔥 <= (Ê₀² + 1)·Ê₀`
    RadiatedUpper,
    /// `Ê₀ <= E_ℐ + E_𝔥`
    RadiatedLower,
    /// `Ê₀ <= (Ê₀⁴ + 2Ê₀² + 2)·Ê_t`
    SliceLower,
    /// `Ê_t <= (Ê₀² + 1)·Ê₀`
    SliceUpper,
}

impl InequalityId {
    pub const ALL: [InequalityId; 4] = [
        InequalityId::RadiatedUpper,
        InequalityId::RadiatedLower,
        InequalityId::SliceLower,
        InequalityId::SliceUpper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::RadiatedUpper => "ineq1",
            InequalityId::RadiatedLower => "ineq2",
            InequalityId::SliceLower => "ineq3",
            InequalityId::SliceUpper => "ineq4",
        }
    }
}

/// Energies a completed forward run feeds into the audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditInputs {
    /// Quartic-free energy on `t = 0`.
    pub e_hat0: f64,
    /// Quartic-free energy on `t = t₁`.
    pub e_hat_t: f64,
    pub late_time: f64,
    /// Full fluxes through the horizon and infinity edges.
    pub e_hplus: f64,
    pub e_iplus: f64,
    /// Full energy on `t = 0`, scale of the slack.
    pub e_sigma0: f64,
    /// Relative closure defect of the run: the worse of the full-edge
    /// identity and the `𝒮_{t₁}` closure.
    pub closure_residual: f64,
}

impl AuditInputs {
    pub fn from_field(field: &GridField, late_time: f64) -> Result<Self> {
        let probe = FieldProbe::new(field);
        let breakdown = energy_breakdown(field, &[late_time])?;
        Ok(AuditInputs {
            e_hat0: quartic_free_energy_with(&probe, 0.0)?,
            e_hat_t: quartic_free_energy_with(&probe, late_time)?,
            late_time,
            e_hplus: breakdown.e_hplus,
            e_iplus: breakdown.e_iplus,
            e_sigma0: breakdown.e_sigma0,
            closure_residual: breakdown.closure_residual.max(breakdown.edge_residual()),
        })
    }

    /// Absolute slack `2·residual·E_Σ₀`.
    pub fn slack(&self) -> f64 {
        2.0 * self.closure_residual * self.e_sigma0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs + slack − lhs`.
    pub margin: f64,
    pub pass: bool,
}

pub fn inequality_audit(inputs: &AuditInputs) -> Result<Vec<AuditRow>> {
    let all = [
        inputs.e_hat0,
        inputs.e_hat_t,
        inputs.e_hplus,
        inputs.e_iplus,
        inputs.e_sigma0,
        inputs.closure_residual,
    ];
    if all.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Degenerate(format!("audit inputs must be finite and non-negative: {inputs:?}")));
    }
    let e0 = inputs.e_hat0;
    let radiated = inputs.e_hplus + inputs.e_iplus;
    let slack = inputs.slack();
    let row = |id, lhs: f64, rhs: f64| {
        let margin = rhs + slack - lhs;
        AuditRow {
            id,
            lhs,
            rhs,
            margin,
            pass: margin >= 0.0,
        }
    };
    Ok(vec![
        row(InequalityId::RadiatedUpper, radiated, (e0 * e0 + 1.0) * e0),
        row(InequalityId::RadiatedLower, e0, radiated),
        row(
            InequalityId::SliceLower,
            e0,
            (e0.powi(4) + 2.0 * e0 * e0 + 2.0) * inputs.e_hat_t,
        ),
        row(InequalityId::SliceUpper, inputs.e_hat_t, (e0 * e0 + 1.0) * e0),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inputs(e0: f64, et: f64, rad: f64) -> AuditInputs {
        AuditInputs {
            e_hat0: e0,
            e_hat_t: et,
            late_time: 40.0,
            e_hplus: 0.25 * rad,
            e_iplus: 0.75 * rad,
            e_sigma0: rad,
            closure_residual: 0.0,
        }
    }

    #[test]
    fn zero_data_holds_trivially() {
        let rows = inequality_audit(&inputs(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert!(r.pass);
            assert_eq!(r.margin, 0.0);
        }
    }

    #[test]
    fn lost_energy_fails_the_lower_bound() {
        let rows = inequality_audit(&inputs(1.0, 1.0, 0.5)).unwrap();
        assert!(!rows[1].pass);
        assert!((rows[1].margin + 0.5).abs() < 1e-15);
    }

    #[test]
    fn slack_rescues_small_defects() {
        let mut inp = inputs(1.0, 1.0, 0.99);
        assert!(!inequality_audit(&inp).unwrap()[1].pass);
        inp.closure_residual = 0.01;
        assert!(inequality_audit(&inp).unwrap()[1].pass);
    }

    #[test]
    fn negative_inputs_rejected() {
        assert!(inequality_audit(&inputs(-1.0, 0.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn conservative_runs_pass_ineq2_to_ineq4(e0 in 1e-6f64..1e3, leak in 0.0f64..0.5) {
            // A conservative run: the radiated energy equals the full initial
            // energy, which dominates the quartic-free part, and the late slice
            // keeps a fraction of the initial energy.
            let rad = e0 * (1.0 + leak);
            let rows = inequality_audit(&inputs(e0, e0 * (1.0 - leak), rad)).unwrap();
            for r in &rows[1..] {
                prop_assert!(r.pass, "{:?}", r);
            }
        }
    }
}
