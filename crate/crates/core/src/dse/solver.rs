//! Gauss–Newton minimization of the weighted residual.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::motor::MotorParams;

use super::chi2::chi_squared_cdf;
use super::config::DseConfig;
use super::jacobian::numerical_jacobian;
use super::residual::{build_residual, residual_rows, state_dim, ObservationWindow};

/// Costs at or below this are treated as an exact fit.
pub const COST_FLOOR: f64 = 1e-12;
const MAX_HALVINGS: usize = 30;
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct GnSettings {
    pub tol_dj: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnOutcome {
    pub x: DVector<f64>,
    /// `εᵀε` at `x`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cost at the start and after every accepted iteration.
    pub history: Vec<f64>,
}

fn finite_cost(r: &DVector<f64>) -> Option<f64> {
    let c = r.norm_squared();
    c.is_finite().then_some(c)
}

/// Least-squares step `Δx` minimizing `‖J·Δx + r‖`.
///
/// Columns are scaled to unit norm before a QR factorization; a rank-deficient
/// system falls back to a ridge-regularized normal equation.
pub fn least_squares_step(jac: &DMatrix<f64>, r: &DVector<f64>) -> Result<DVector<f64>> {
    let (m, n) = jac.shape();
    if r.len() != m {
        return Err(Error::DimensionMismatch { expected: m, actual: r.len() });
    }
    let norms: Vec<f64> = jac.column_iter().map(|c| c.norm()).collect();
    let scale: Vec<f64> = norms.iter().map(|&c| if c > 0.0 { c } else { 1.0 }).collect();
    let mut a = jac.clone();
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }

    let mut rank = 0;
    if m >= n {
        let qr = a.clone().qr();
        let rmat = qr.r();
        let diag_max = rmat.diagonal().amax();
        rank = rmat.diagonal().iter().filter(|d| d.abs() > RANK_TOL * diag_max).count();
        if rank == n && norms.iter().all(|&c| c > 0.0) {
            let rhs = -(qr.q().transpose() * r);
            let y = rmat.solve_upper_triangular(&rhs).ok_or(Error::SingularMatrix("least-squares step"))?;
            return Ok(DVector::from_fn(n, |j, _| y[j] / scale[j]));
        }
    }

    let normal = a.transpose() * &a;
    let mu = 1e-10 * normal.trace() / n as f64;
    if !(mu > 0.0) {
        return Err(Error::RankDeficient { rank, cols: n });
    }
    let regularized = normal + DMatrix::identity(n, n) * mu;
    let chol = regularized.cholesky().ok_or(Error::RankDeficient { rank, cols: n })?;
    let y = chol.solve(&(-(a.transpose() * r)));
    Ok(DVector::from_fn(n, |j, _| y[j] / scale[j]))
}

/// Gauss–Newton on a residual function with step halving.
///
/// Stops when `|ln J_i − ln J_{i−1}| < tol_dj`, when the cost falls to
/// [`COST_FLOOR`], when no step length reduces the cost, or after `max_iter`
/// iterations.
pub fn gauss_newton<F>(f: F, x0: DVector<f64>, s: &GnSettings) -> Result<GnOutcome>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut x = x0;
    let mut r = f(&x)?;
    let mut cost = finite_cost(&r).ok_or(Error::NonFinite("initial residual"))?;
    let mut history = vec![cost];
    if cost <= COST_FLOOR {
        return Ok(GnOutcome { x, cost, iterations: 0, converged: true, history });
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < s.max_iter {
        iterations += 1;
        let jac = numerical_jacobian(&f, &x)?;
        let dx = least_squares_step(&jac, &r)?;
        if dx.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gauss-newton step"));
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let xt = &x + &dx * alpha;
            if let Ok(rt) = f(&xt) {
                if let Some(ct) = finite_cost(&rt) {
                    if ct <= cost {
                        accepted = Some((xt, rt, ct));
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        let Some((xt, rt, ct)) = accepted else {
            // No descent direction left at working precision.
            converged = true;
            break;
        };
        let dj = (ct.ln() - cost.ln()).abs();
        x = xt;
        r = rt;
        cost = ct;
        history.push(cost);
        if cost <= COST_FLOOR || dj < s.tol_dj {
            converged = true;
            break;
        }
    }
    Ok(GnOutcome { x, cost, iterations, converged, history })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Healthy,
    Fault,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Healthy => "Healthy",
            Verdict::Fault => "Fault",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub x: DVector<f64>,
    pub j_cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub m: usize,
    pub n: usize,
    pub dof: usize,
    pub p: f64,
    pub verdict: Verdict,
}

/// Seeded normal initial state with standard deviation `sigma_init`.
pub fn cold_start(n_samples: usize, sigma_init: f64, seed: u64) -> DVector<f64> {
    let dim = state_dim(n_samples);
    if sigma_init == 0.0 {
        return DVector::zeros(dim);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma_init).expect("sigma_init validated");
    DVector::from_iterator(dim, (0..dim).map(|_| normal.sample(&mut rng)))
}

/// Estimate the state trajectory of one window and test the fit.
pub fn gauss_newton_solve(
    w: &ObservationWindow,
    p: &MotorParams,
    cfg: &DseConfig,
    x_init: Option<&DVector<f64>>,
) -> Result<EstimationResult> {
    cfg.validate()?;
    w.validate()?;
    let n = state_dim(w.len());
    let m = residual_rows(w.len(), cfg.include_speed_residual);
    let x0 = match x_init {
        Some(x) if x.len() != n => return Err(Error::DimensionMismatch { expected: n, actual: x.len() }),
        Some(x) => x.clone(),
        None => cold_start(w.len(), cfg.sigma_init, cfg.seed),
    };
    let out =
        gauss_newton(|x| build_residual(x, w, p, cfg), x0, &GnSettings { tol_dj: cfg.tol_dj, max_iter: cfg.max_iter })?;
    let dof = m - n;
    let p_val = chi_squared_cdf(out.cost, dof)?;
    Ok(EstimationResult {
        x: out.x,
        j_cost: out.cost,
        iterations: out.iterations,
        converged: out.converged,
        m,
        n,
        dof,
        p: p_val,
        verdict: if p_val >= cfg.p_threshold { Verdict::Fault } else { Verdict::Healthy },
    })
}
