//! Run configuration file: one TOML document per experiment.
//!
//! Every key is optional and falls back to the nominal machine, the 460 V
//! 60 Hz supply, and the default event timeline. Unknown keys are rejected.
//!
//! ```toml
//! [fault]
//! kind = "line_ground"
//! phases = "A"
//!
//! [sim]
//! seed = 3
//!
//! [dse]
//! n = 5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dse::{DseConfig, Weights, VIRTUAL_SIGMA};
use crate::error::{Error, Result};
use crate::motor::MotorParams;
use crate::sim::{FaultSpec, LoadConfig, Scenario, SimConfig, SourceConfig};

/// Residual weights as written in a config file; absent entries are derived
/// from the scenario's noise levels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub voltage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torque: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DseSection {
    pub n: usize,
    pub stride: usize,
    pub tol_dj: f64,
    pub max_iter: usize,
    pub sigma_init: f64,
    pub seed: u64,
    pub p_threshold: f64,
    pub include_speed_residual: bool,
    pub parallel: bool,
    pub weights: WeightsSection,
}

impl Default for DseSection {
    fn default() -> Self {
        let d = DseConfig::default();
        Self {
            n: d.n,
            stride: d.stride,
            tol_dj: d.tol_dj,
            max_iter: d.max_iter,
            sigma_init: d.sigma_init,
            seed: d.seed,
            p_threshold: d.p_threshold,
            include_speed_residual: d.include_speed_residual,
            parallel: d.parallel,
            weights: WeightsSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub motor: MotorParams,
    pub source: SourceConfig,
    pub load: LoadConfig,
    pub fault: FaultSpec,
    pub sim: SimConfig,
    pub dse: DseSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn scenario(&self) -> Scenario {
        Scenario { motor: self.motor, source: self.source, load: self.load, fault: self.fault.clone(), sim: self.sim }
    }

    /// Check every section; parameter errors are reported as config errors.
    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::InvalidParameter(m) | Error::DegenerateParameters(m) => Error::Config(m),
            other => other,
        };
        self.scenario().validate().map_err(as_config)?;
        let w = &self.dse.weights;
        for (name, v) in
            [("voltage", w.voltage), ("current", w.current), ("flux", w.flux), ("torque", w.torque), ("speed", w.speed)]
        {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!("dse.weights.{name} must be > 0, got {v}")));
                }
            }
        }
        self.dse_config().and_then(|c| c.validate()).map_err(as_config)
    }

    /// Estimator settings with absent weights derived from the noise levels.
    ///
    /// A zero noise level falls back to the scenario's default level so the
    /// weights stay positive.
    pub fn dse_config(&self) -> Result<DseConfig> {
        let sc = self.scenario();
        let sigma_v = match sc.sigma_v() {
            s if s > 0.0 => s,
            _ => sc.default_sigma_v(),
        };
        let sigma_i = match sc.sigma_i()? {
            s if s > 0.0 => s,
            _ => sc.default_sigma_i()?,
        };
        let derived = Weights::from_noise(sigma_v, sigma_i, 1.0 / self.sim.f_sample);
        let w = &self.dse.weights;
        let d = &self.dse;
        Ok(DseConfig {
            n: d.n,
            stride: d.stride,
            tol_dj: d.tol_dj,
            max_iter: d.max_iter,
            sigma_init: d.sigma_init,
            seed: d.seed,
            weights: Weights {
                voltage: w.voltage.unwrap_or(derived.voltage),
                current: w.current.unwrap_or(derived.current),
                flux: w.flux.unwrap_or(derived.flux),
                torque: w.torque.unwrap_or(VIRTUAL_SIGMA),
                speed: w.speed.unwrap_or(VIRTUAL_SIGMA),
            },
            p_threshold: d.p_threshold,
            include_speed_residual: d.include_speed_residual,
            parallel: d.parallel,
        })
    }

    /// Copy with every derived default written out.
    pub fn resolved(&self) -> Result<RunConfig> {
        let mut out = self.clone();
        let sc = self.scenario().resolved()?;
        out.sim = sc.sim;
        let w = self.dse_config()?.weights;
        out.dse.weights = WeightsSection {
            voltage: Some(w.voltage),
            current: Some(w.current),
            flux: Some(w.flux),
            torque: Some(w.torque),
            speed: Some(w.speed),
        };
        Ok(out)
    }
}
