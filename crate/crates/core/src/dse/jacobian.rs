use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const EPS_REL: f64 = 1e-6;
pub const EPS_ABS: f64 = 1e-8;

/// Central-difference step for coordinate value `x`.
pub fn step_for(x: f64) -> f64 {
    (EPS_REL * x.abs()).max(EPS_ABS)
}

/// Central-difference Jacobian of `f` at `x`.
pub fn numerical_jacobian<F>(f: F, x: &DVector<f64>) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut xp = x.clone();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let h = step_for(x[j]);
        let (hi, lo) = (x[j] + h, x[j] - h);
        xp[j] = hi;
        let fp = f(&xp)?;
        xp[j] = lo;
        let fm = f(&xp)?;
        xp[j] = x[j];
        if fp.len() != fm.len() {
            return Err(Error::DimensionMismatch { expected: fp.len(), actual: fm.len() });
        }
        if fp.iter().chain(fm.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("jacobian evaluation"));
        }
        // Divide by the representable span, not 2h.
        cols.push((fp - fm) / (hi - lo));
    }
    let m = match cols.first() {
        Some(c) => c.len(),
        None => f(x)?.len(),
    };
    let mut jac = DMatrix::zeros(m, x.len());
    for (j, c) in cols.iter().enumerate() {
        if c.len() != m {
            return Err(Error::DimensionMismatch { expected: m, actual: c.len() });
        }
        jac.set_column(j, c);
    }
    Ok(jac)
}
