//! Schwarzschild exterior geometry in geometric units (`G = c = 1`).
//!
//! Near the horizon `r - 2M` is far below the spacing of `f64` values around
//! `2M` (at `r_* = -120`, `r - 2M ≈ 1e-27`), so the inverse tortoise map is
//! solved for the *excess radius* `y = r - 2M` and every quantity that
//! vanishes at the horizon (`F`, `V_l`) is formed from `y` directly.

use crate::error::{Error, Result};

pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
const MAX_NEWTON_ITERATIONS: usize = 200;
const MAX_BISECTION_ITERATIONS: usize = 400;

/// Mass and foliation constants of the exterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackHoleParams {
    mass: f64,
    r_fh: f64,
    newton_tol: f64,
}

/// Value and radial derivative of the slicing function `λ(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaValue {
    pub value: f64,
    pub slope: f64,
}

/// Concrete slicing function: `λ = r_*` for `r >= 5M/2`, continued inward
/// linearly with the matching slope `1/F(5M/2) = 5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaProfile {
    pub r_break: f64,
    pub slope_inner: f64,
    /// `λ(r_break) = r_*(r_break)`.
    pub value_break: f64,
}

impl BlackHoleParams {
    pub fn new(mass: f64, r_fh: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::config(format!("mass must be positive, got {mass}")));
        }
        if !(r_fh.is_finite() && r_fh > 5.0 * mass) {
            return Err(Error::config(format!(
                "matching radius r_FH must exceed 5M = {}, got {r_fh}",
                5.0 * mass
            )));
        }
        Ok(BlackHoleParams {
            mass,
            r_fh,
            newton_tol: DEFAULT_NEWTON_TOL,
        })
    }

    pub fn with_newton_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-6) {
            return Err(Error::config(format!(
                "newton_tol must lie in (0, 1e-6], got {tol}"
            )));
        }
        self.newton_tol = tol;
        Ok(self)
    }

    /// `M = 1`, `r_FH = 10M`.
    pub fn unit_mass() -> Self {
        BlackHoleParams {
            mass: 1.0,
            r_fh: 10.0,
            newton_tol: DEFAULT_NEWTON_TOL,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn r_fh(&self) -> f64 {
        self.r_fh
    }

    pub fn newton_tol(&self) -> f64 {
        self.newton_tol
    }

    fn excess(&self, r: f64) -> Result<f64> {
        let y = r - 2.0 * self.mass;
        if y > 0.0 && y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain {
                what: "radius r (requires r > 2M)",
                value: r,
            })
        }
    }

    /// `F(r) = 1 - 2M/r`.
    pub fn metric_f(&self, r: f64) -> Result<f64> {
        let y = self.excess(r)?;
        Ok(y / r)
    }

    /// `F` from the excess radius `y = r - 2M`.
    pub fn metric_f_of_excess(&self, y: f64) -> f64 {
        y / (2.0 * self.mass + y)
    }

    /// Regge-Wheeler coordinate `r_* = r + 2M ln(r - 2M)`.
    pub fn rstar_of_r(&self, r: f64) -> Result<f64> {
        let y = self.excess(r)?;
        self.rstar_of_excess(y)
    }

    pub fn rstar_of_excess(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Domain {
                what: "excess radius r - 2M",
                value: y,
            });
        }
        let m2 = 2.0 * self.mass;
        Ok(m2 + y + m2 * y.ln())
    }

    /// Inverse of [`rstar_of_r`](Self::rstar_of_r), returning `r - 2M`.
    ///
    /// Newton iteration on `s = ln(r - 2M)`. The map `s ↦ e^s + 2Ms` is convex
    /// and increasing, so a seed to the right of the root converges
    /// monotonically. Falls back to bisection if Newton misbehaves.
    pub fn excess_of_rstar(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain {
                what: "tortoise coordinate r_*",
                value: x,
            });
        }
        let m2 = 2.0 * self.mass;
        let residual = |s: f64| s.exp() + m2 * s + m2 - x;
        let tol = self.newton_tol * x.abs().max(1.0);

        // Both candidates bound the root from above (the second only once y >= 1).
        let horizon_branch = (x - m2) / m2;
        let mut s = if x >= m2 + 1.0 {
            horizon_branch.min((x - m2).ln())
        } else {
            horizon_branch
        };

        let mut converged = false;
        for _ in 0..MAX_NEWTON_ITERATIONS {
            let g = residual(s);
            if !g.is_finite() {
                break;
            }
            let step = g / (s.exp() + m2);
            let next = s - step;
            if !next.is_finite() {
                break;
            }
            if step.abs() <= 4.0 * f64::EPSILON * s.abs().max(1.0) || g == 0.0 {
                s = next;
                converged = true;
                break;
            }
            s = next;
        }

        if !converged || residual(s).abs() > tol {
            s = self.bisect_log_excess(x, residual)?;
        }
        let g = residual(s);
        if g.abs() > tol {
            return Err(Error::Convergence {
                what: "r(r_*)",
                iterations: MAX_NEWTON_ITERATIONS,
                residual: g,
            });
        }
        Ok(s.exp())
    }

    fn bisect_log_excess(&self, x: f64, residual: impl Fn(f64) -> f64) -> Result<f64> {
        let m2 = 2.0 * self.mass;
        let mut hi = (x - m2) / m2 + 1.0;
        let mut lo = hi - 2.0;
        let mut widen = 0;
        while residual(lo) > 0.0 {
            lo -= 2.0f64.powi(widen);
            widen += 1;
            if widen > 64 {
                return Err(Error::Convergence {
                    what: "r(r_*) bracket",
                    iterations: widen as usize,
                    residual: residual(lo),
                });
            }
        }
        while residual(hi) < 0.0 {
            hi += 1.0;
        }
        for _ in 0..MAX_BISECTION_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if residual(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Radius `r > 2M` with `r_*(r) = x`. Rounds to `2M` once `r - 2M`
    /// drops below the `f64` spacing at `2M`; use
    /// [`excess_of_rstar`](Self::excess_of_rstar) there.
    pub fn r_of_rstar(&self, x: f64) -> Result<f64> {
        Ok(2.0 * self.mass + self.excess_of_rstar(x)?)
    }

    pub fn lambda_profile(&self) -> LambdaProfile {
        let r_break = 2.5 * self.mass;
        let f_break = self.metric_f_of_excess(0.5 * self.mass);
        LambdaProfile {
            r_break,
            slope_inner: 1.0 / f_break,
            value_break: self.rstar_of_excess(0.5 * self.mass).expect("5M/2 > 2M"),
        }
    }

    pub fn lambda(&self, r: f64) -> Result<LambdaValue> {
        let y = self.excess(r)?;
        self.lambda_of_excess(y)
    }

    pub fn lambda_of_excess(&self, y: f64) -> Result<LambdaValue> {
        let profile = self.lambda_profile();
        let y_break = 0.5 * self.mass;
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Domain {
                what: "excess radius r - 2M",
                value: y,
            });
        }
        if y >= y_break {
            Ok(LambdaValue {
                value: self.rstar_of_excess(y)?,
                slope: 1.0 / self.metric_f_of_excess(y),
            })
        } else {
            Ok(LambdaValue {
                value: profile.value_break + profile.slope_inner * (y - y_break),
                slope: profile.slope_inner,
            })
        }
    }

    /// `λ` at the horizon limit `r → 2M⁺`.
    pub fn lambda_at_horizon(&self) -> f64 {
        let profile = self.lambda_profile();
        profile.value_break - profile.slope_inner * 0.5 * self.mass
    }

    /// `ṽ = t + r_* - λ(r(r_*))`.
    pub fn tilde_v(&self, t: f64, rstar: f64) -> Result<f64> {
        let y = self.excess_of_rstar(rstar)?;
        Ok(t + rstar - self.lambda_of_excess(y)?.value)
    }

    /// `(5M/2)_*`, where the slicing function joins `r_*`.
    pub fn rstar_break(&self) -> f64 {
        self.lambda_profile().value_break
    }

    /// `(r_FH)_*`.
    pub fn rstar_fh(&self) -> f64 {
        self.rstar_of_r(self.r_fh).expect("r_FH > 5M")
    }

    /// `(5M)_*`, the outer edge of the near-horizon decay region.
    pub fn rstar_five_m(&self) -> f64 {
        self.rstar_of_excess(3.0 * self.mass).expect("5M > 2M")
    }
}

/// Eddington-Finkelstein coordinates `(u, v) = (t - r_*, t + r_*)`.
pub fn null_coords(t: f64, rstar: f64) -> (f64, f64) {
    (t - rstar, t + rstar)
}

/// Inverse of [`null_coords`].
pub fn time_and_rstar(u: f64, v: f64) -> (f64, f64) {
    (0.5 * (u + v), 0.5 * (v - u))
}
