use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard deviations used to normalize each class of residual row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    /// dq voltage rows, V.
    pub voltage: f64,
    /// dq current rows, A.
    pub current: f64,
    /// Virtual flux rows, V·s.
    pub flux: f64,
    /// Virtual torque rows, N·m.
    pub torque: f64,
    /// Virtual speed rows, electrical rad/s.
    pub speed: f64,
}

/// Weight of the torque and speed rows, which carry no measurement noise.
pub const VIRTUAL_SIGMA: f64 = 1e-3;

impl Default for Weights {
    /// Weights for the nominal machine at 1 % noise sampled at 100 Hz.
    fn default() -> Self {
        Self::from_noise(3.755_884, 0.088_853, 0.01)
    }
}

impl Weights {
    /// Weights matched to per-phase noise `sigma_v`, `sigma_i` at sample
    /// spacing `dt`.
    ///
    /// Each flux row integrates two measured voltage samples over half an
    /// interval, and the dq image of independent per-phase noise has variance
    /// `(2/3)·σ²`, so the flux-row noise is `dt·σ_v/√3`.
    pub fn from_noise(sigma_v: f64, sigma_i: f64, dt: f64) -> Self {
        Self {
            voltage: sigma_v,
            current: sigma_i,
            flux: dt * sigma_v / 3f64.sqrt(),
            torque: VIRTUAL_SIGMA,
            speed: VIRTUAL_SIGMA,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            voltage: self.voltage * c,
            current: self.current * c,
            flux: self.flux * c,
            torque: self.torque * c,
            speed: self.speed * c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DseConfig {
    /// Samples per window.
    pub n: usize,
    /// Samples between consecutive window starts.
    pub stride: usize,
    /// Convergence threshold on `|ln J_i − ln J_{i−1}|`.
    pub tol_dj: f64,
    pub max_iter: usize,
    /// Scale of the random initial state of a cold start.
    pub sigma_init: f64,
    pub seed: u64,
    pub weights: Weights,
    pub p_threshold: f64,
    pub include_speed_residual: bool,
    /// Solve windows independently from cold starts on all cores.
    pub parallel: bool,
}

impl Default for DseConfig {
    fn default() -> Self {
        Self {
            n: 5,
            stride: 1,
            tol_dj: 1e-6,
            max_iter: 50,
            sigma_init: 0.01,
            seed: 7,
            weights: Weights::default(),
            p_threshold: 0.95,
            include_speed_residual: true,
            parallel: false,
        }
    }
}

impl DseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("dse.n must be >= 2, got {}", self.n)));
        }
        if self.stride < 1 {
            return Err(Error::InvalidParameter("dse.stride must be >= 1".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter("dse.max_iter must be >= 1".into()));
        }
        if !(self.tol_dj > 0.0) {
            return Err(Error::InvalidParameter("dse.tol_dj must be > 0".into()));
        }
        if !(self.sigma_init >= 0.0) {
            return Err(Error::InvalidParameter("dse.sigma_init must be >= 0".into()));
        }
        let w = &self.weights;
        for (name, v) in
            [("voltage", w.voltage), ("current", w.current), ("flux", w.flux), ("torque", w.torque), ("speed", w.speed)]
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("dse.weights.{name} must be > 0, got {v}")));
            }
        }
        if !(self.p_threshold > 0.0 && self.p_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dse.p_threshold must lie in (0, 1), got {}",
                self.p_threshold
            )));
        }
        Ok(())
    }
}
