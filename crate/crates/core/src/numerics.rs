//! Small numerical kernels shared by the solver and the audits.

use crate::error::{Error, Result};

/// Composite trapezoid rule on (possibly nonuniform) samples.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Composite trapezoid rule for `f` on `[a, b]` with `intervals` equal
/// sub-intervals. The integrand is fallible so that probes outside a
/// computed region surface as errors.
pub fn trapezoid_fn(
    a: f64,
    b: f64,
    intervals: usize,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    if intervals == 0 || a == b {
        return Ok(0.0);
    }
    let step = (b - a) / intervals as f64;
    let mut sum = 0.5 * (f(a)? + f(b)?);
    for k in 1..intervals {
        sum += f(a + step * k as f64)?;
    }
    Ok(sum * step)
}

/// Number of equal sub-intervals of `[a, b]` no longer than `max_step`.
pub fn intervals_for(a: f64, b: f64, max_step: f64) -> usize {
    ((b - a).abs() / max_step).ceil().max(1.0) as usize
}

/// Second-order first derivative on nonuniform samples: three-point central
/// formula in the interior, three-point one-sided formulas at the ends.
pub fn gradient(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    debug_assert_eq!(n, ys.len());
    if n < 3 {
        return match n {
            2 => {
                let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
                vec![d, d]
            }
            _ => vec![0.0; n],
        };
    }
    let three_point = |x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64, at: f64| {
        // derivative of the interpolating parabola through (x_k, y_k) at `at`
        y0 * (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + y1 * (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + y2 * (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1))
    };
    let mut out = Vec::with_capacity(n);
    out.push(three_point(xs[0], xs[1], xs[2], ys[0], ys[1], ys[2], xs[0]));
    for k in 1..n - 1 {
        out.push(three_point(
            xs[k - 1],
            xs[k],
            xs[k + 1],
            ys[k - 1],
            ys[k],
            ys[k + 1],
            xs[k],
        ));
    }
    out.push(three_point(
        xs[n - 3],
        xs[n - 2],
        xs[n - 1],
        ys[n - 3],
        ys[n - 2],
        ys[n - 1],
        xs[n - 1],
    ));
    out
}

/// Four-point Lagrange (cubic) interpolation on strictly increasing samples.
/// Exact at the sample points.
#[derive(Debug, Clone, Copy)]
pub struct CubicInterpolator<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
}

impl<'a> CubicInterpolator<'a> {
    pub fn new(xs: &'a [f64], ys: &'a [f64]) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 4 {
            return Err(Error::Degenerate(format!(
                "cubic interpolation needs >= 4 paired samples, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        Ok(CubicInterpolator { xs, ys })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// `None` outside the sampled range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let n = self.xs.len();
        // index of the left end of the bracketing interval
        let k = match self.xs.binary_search_by(|probe| probe.total_cmp(&x)) {
            Ok(exact) => return Some(self.ys[exact]),
            Err(insert) => insert - 1,
        };
        let start = k.saturating_sub(1).min(n - 4);
        let xs = &self.xs[start..start + 4];
        let ys = &self.ys[start..start + 4];
        let mut acc = 0.0;
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (x - xs[b]) / (xs[a] - xs[b]);
                }
            }
            acc += w * ys[a];
        }
        Some(acc)
    }
}

/// Ordinary least squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; `1.0` for a perfect fit.
    pub r2: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 3 {
        return Err(Error::Degenerate(format!(
            "line fit needs >= 3 paired points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(Error::Degenerate("line fit abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy <= 0.0 {
        1.0
    } else {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - slope * x - intercept).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LineFit {
        slope,
        intercept,
        r2,
    })
}
