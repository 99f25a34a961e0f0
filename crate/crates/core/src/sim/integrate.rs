//! Implicit trapezoidal rule.

use nalgebra::SVector;

use crate::error::{Error, Result};

/// Relative tolerance on the fixed-point correction.
pub const STEP_TOL: f64 = 1e-10;
pub const MAX_INNER_ITER: usize = 50;

/// One trapezoidal step `x1 = x0 + Δt/2·(f(t0, x0) + f(t0 + Δt, x1))`.
///
/// `f0` is `f(t0, x0)`. The implicit equation is solved by fixed-point
/// iteration seeded with a forward-Euler predictor. Returns `x1` together
/// with `f(t0 + Δt, x1)` so the caller can reuse it as the next `f0`.
pub fn trapezoidal_step<const N: usize, F>(
    mut f: F,
    t0: f64,
    x0: &SVector<f64, N>,
    f0: &SVector<f64, N>,
    dt: f64,
) -> Result<(SVector<f64, N>, SVector<f64, N>)>
where
    F: FnMut(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step must be > 0, got {dt}")));
    }
    let t1 = t0 + dt;
    let half = 0.5 * dt;
    let base = x0 + f0 * half;
    let mut x = x0 + f0 * dt;
    for _ in 0..MAX_INNER_ITER {
        let f1 = f(t1, &x)?;
        let next = base + f1 * half;
        let converged =
            next.iter().zip(x.iter()).all(|(a, b)| (a - b).abs() <= STEP_TOL * a.abs().max(b.abs()) + 1e-300);
        if !next.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("trapezoidal step"));
        }
        x = next;
        if converged {
            let f1 = f(t1, &x)?;
            return Ok((x, f1));
        }
    }
    Err(Error::NonConvergence { iterations: MAX_INNER_ITER, t: t1 })
}
