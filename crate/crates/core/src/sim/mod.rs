//! Direct-online start of the machine behind a resistive source, with an
//! optional shunt fault at its terminals.
//!
//! Event timeline: the supply is connected at `t = 0`, the constant-torque
//! load steps on at `load.t_load`, and the fault block is active on
//! `[fault.t_on, fault.t_off)`.

mod fault;
mod integrate;
mod record;

pub use fault::{fault_conductance, terminal_solve, FaultKind, FaultSpec};
pub use integrate::{trapezoidal_step, MAX_INNER_ITER, STEP_TOL};
pub use record::{
    read_measurement_csv, to_dq_series, write_current_csv, write_measurement_csv, write_truth_csv, write_voltage_csv,
    DqSeries, CURRENT_PLOT_HEADER, MEASUREMENT_HEADER, TRUTH_HEADER, VOLTAGE_PLOT_HEADER,
};

use std::f64::consts::SQRT_2;

use nalgebra::SVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{balanced_source, inverse_park, park, peak_phase_voltage, FrameAngle};
use crate::motor::{
    currents_from_fluxes, electrical_torque, state_derivative, steady_state_oracle, ElectricalState, MechanicalState,
    MotorParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    /// Line-line rms voltage, V.
    pub v_ll: f64,
    /// Frequency, Hz.
    pub f: f64,
    /// Phase-A angle at t = 0, rad.
    pub theta0: f64,
    /// Series source resistance, Ω.
    pub r_src: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self { v_ll: 460.0, f: 60.0, theta0: 0.0, r_src: 0.5 }
    }
}

impl SourceConfig {
    pub fn frame(&self) -> FrameAngle {
        FrameAngle::new(self.theta0, 2.0 * std::f64::consts::PI * self.f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoadConfig {
    /// Constant load torque once applied, N·m.
    pub t_m: f64,
    /// Load switch-on time, s.
    pub t_load: f64,
}

impl Default for LoadConfig {
    fn default() -> Self {
        Self { t_m: 50.0, t_load: 3.0 }
    }
}

impl LoadConfig {
    pub fn torque_at(&self, t: f64) -> f64 {
        if t >= self.t_load {
            self.t_m
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Integration step, s.
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Per-phase voltage noise std, V. Absent means 1 % of peak phase voltage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_v: Option<f64>,
    /// Per-phase current noise std, A. Absent means 1 % of peak rated current.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_i: Option<f64>,
    /// Output sample rate after decimation, Hz.
    pub f_sample: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 50e-6, t_end: 6.0, seed: 1, sigma_v: None, sigma_i: None, f_sample: 100.0 }
    }
}

/// Everything needed to reproduce one simulated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub motor: MotorParams,
    pub source: SourceConfig,
    pub load: LoadConfig,
    pub fault: FaultSpec,
    pub sim: SimConfig,
}

impl Scenario {
    /// Default noise std on phase voltages, V.
    pub fn default_sigma_v(&self) -> f64 {
        0.01 * peak_phase_voltage(self.source.v_ll)
    }

    /// Default noise std on phase currents: 1 % of the peak current drawn at
    /// rated torque and nominal voltage, A.
    pub fn default_sigma_i(&self) -> Result<f64> {
        let m = &self.motor;
        let ss = steady_state_oracle(m, m.v_ll, m.f_nom, m.rated_torque())?;
        Ok(0.01 * SQRT_2 * ss.i_stator_rms)
    }

    pub fn sigma_v(&self) -> f64 {
        self.sim.sigma_v.unwrap_or_else(|| self.default_sigma_v())
    }

    pub fn sigma_i(&self) -> Result<f64> {
        match self.sim.sigma_i {
            Some(s) => Ok(s),
            None => self.default_sigma_i(),
        }
    }

    /// Copy with derived defaults written out explicitly.
    pub fn resolved(&self) -> Result<Scenario> {
        let mut sc = self.clone();
        sc.sim.sigma_v = Some(self.sigma_v());
        sc.sim.sigma_i = Some(self.sigma_i()?);
        Ok(sc)
    }

    /// Fine steps per output sample.
    pub fn decimation(&self) -> Result<usize> {
        let ratio = 1.0 / (self.sim.dt * self.sim.f_sample);
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > 1e-6 * k {
            return Err(Error::InvalidParameter(format!(
                "sim.f_sample ({}) must divide 1/sim.dt ({}) evenly",
                self.sim.f_sample,
                1.0 / self.sim.dt
            )));
        }
        Ok(k as usize)
    }

    pub fn steps(&self) -> usize {
        (self.sim.t_end / self.sim.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.motor.validate()?;
        self.fault.validate()?;
        let s = &self.source;
        if !(s.v_ll >= 0.0 && s.f > 0.0 && s.theta0.is_finite()) {
            return Err(Error::InvalidParameter("source needs v_ll >= 0, f > 0, finite theta0".into()));
        }
        if !(s.r_src.is_finite() && s.r_src > 0.0) {
            return Err(Error::InvalidParameter(format!("source.r_src must be > 0, got {}", s.r_src)));
        }
        let sim = &self.sim;
        if !(sim.dt > 0.0 && sim.dt <= 1.0 / (200.0 * s.f) * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "sim.dt ({}) must be positive and at most 1/(200 f) = {}",
                sim.dt,
                1.0 / (200.0 * s.f)
            )));
        }
        if !(sim.t_end > 0.0 && sim.t_end.is_finite()) {
            return Err(Error::InvalidParameter("sim.t_end must be > 0".into()));
        }
        for (name, v) in [("sim.sigma_v", sim.sigma_v), ("sim.sigma_i", sim.sigma_i)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")));
                }
            }
        }
        if !(self.load.t_load >= 0.0 && self.load.t_m.is_finite()) {
            return Err(Error::InvalidParameter("load needs t_load >= 0 and finite t_m".into()));
        }
        self.decimation()?;
        Ok(())
    }
}

/// Ground-truth internal state at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TruthSample {
    pub flux: ElectricalState,
    pub t_e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimSample {
    pub t: f64,
    /// Terminal line-ground voltages, V.
    pub v: [f64; 3],
    /// Source phase currents, A.
    pub i: [f64; 3],
    /// Load torque, N·m.
    pub t_m: f64,
    /// Shaft speed, mechanical rad/s.
    pub omega_m: f64,
    pub truth: TruthSample,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimRecord {
    pub samples: Vec<SimSample>,
}

impl SimRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Every `k`-th sample starting with the first.
    pub fn decimate(&self, k: usize) -> SimRecord {
        SimRecord { samples: self.samples.iter().step_by(k.max(1)).copied().collect() }
    }

    /// Samples with `t0 <= t <= t1`.
    pub fn between(&self, t0: f64, t1: f64) -> impl Iterator<Item = &SimSample> {
        self.samples.iter().filter(move |s| s.t >= t0 - 1e-9 && s.t <= t1 + 1e-9)
    }
}

/// State layout used by the integrator: four fluxes then shaft speed.
pub type PlantState = SVector<f64, 5>;

struct Plant<'a> {
    sc: &'a Scenario,
    frame: FrameAngle,
}

struct Terminal {
    v: [f64; 3],
    i_src: [f64; 3],
    t_m: f64,
    t_e: f64,
}

impl<'a> Plant<'a> {
    fn new(sc: &'a Scenario) -> Self {
        Self { sc, frame: sc.source.frame() }
    }

    fn terminal(&self, t: f64, x: &PlantState) -> Result<(Terminal, [f64; 2])> {
        let p = &self.sc.motor;
        let es = ElectricalState::new(x[0], x[1], x[2], x[3]);
        let cur = currents_from_fluxes(p, &es)?;
        let theta = self.frame.angle(t);
        let i_motor = inverse_park(theta, [cur.iqs, cur.ids, 0.0]);
        let e = balanced_source(self.sc.source.v_ll, &self.frame, t).as_array();
        let g = fault_conductance(&self.sc.fault, t);
        let r_src = self.sc.source.r_src;
        let v = terminal_solve(e, i_motor, &g, r_src)?;
        let i_src = [(e[0] - v[0]) / r_src, (e[1] - v[1]) / r_src, (e[2] - v[2]) / r_src];
        let [vq, vd, _] = park(theta, v);
        let term = Terminal { v, i_src, t_m: self.sc.load.torque_at(t), t_e: electrical_torque(p, &es)? };
        Ok((term, [vq, vd]))
    }

    fn rhs(&self, t: f64, x: &PlantState) -> Result<PlantState> {
        let (term, [vq, vd]) = self.terminal(t, x)?;
        let es = ElectricalState::new(x[0], x[1], x[2], x[3]);
        let ms = MechanicalState { omega_m: x[4] };
        let d = state_derivative(&self.sc.motor, &es, &ms, vq, vd, self.frame.omega, term.t_m)?;
        Ok(PlantState::new(d.lqs, d.lds, d.lqr, d.ldr, d.omega_m))
    }

    fn sample(&self, t: f64, x: &PlantState) -> Result<SimSample> {
        let (term, _) = self.terminal(t, x)?;
        Ok(SimSample {
            t,
            v: term.v,
            i: term.i_src,
            t_m: term.t_m,
            omega_m: x[4],
            truth: TruthSample { flux: ElectricalState::new(x[0], x[1], x[2], x[3]), t_e: term.t_e },
        })
    }
}

/// Noise-free trajectory at the integration step, from the de-energized state.
pub fn simulate_clean(sc: &Scenario) -> Result<SimRecord> {
    sc.validate()?;
    integrate_to(sc, sc.steps(), sc.sim.dt)
}

/// Integrate `steps` steps of size `dt` without validation or noise.
pub(crate) fn integrate_to(sc: &Scenario, steps: usize, dt: f64) -> Result<SimRecord> {
    let plant = Plant::new(sc);
    let mut x = PlantState::zeros();
    let mut fx = plant.rhs(0.0, &x)?;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(plant.sample(0.0, &x)?);
    for n in 0..steps {
        let t0 = n as f64 * dt;
        let (nx, _) = trapezoidal_step(|t, s| plant.rhs(t, s), t0, &x, &fx, dt)?;
        x = nx;
        // Re-evaluate at the grid time so switching instants land on n·dt exactly.
        let t1 = (n + 1) as f64 * dt;
        fx = plant.rhs(t1, &x)?;
        samples.push(plant.sample(t1, &x)?);
    }
    Ok(SimRecord { samples })
}

/// Plant state after integrating to `t` with step `dt` (used by convergence studies).
pub fn state_at(sc: &Scenario, t: f64, dt: f64) -> Result<PlantState> {
    let steps = (t / dt).round() as usize;
    let rec = integrate_to(sc, steps, dt)?;
    let last = rec.samples.last().copied().unwrap_or_default();
    let f = last.truth.flux;
    Ok(PlantState::new(f.lqs, f.lds, f.lqr, f.ldr, last.omega_m))
}

/// Trajectory at the integration step with measurement noise added.
pub fn simulate_measured(sc: &Scenario) -> Result<SimRecord> {
    let mut rec = simulate_clean(sc)?;
    add_noise(&mut rec, sc.sigma_v(), sc.sigma_i()?, sc.sim.seed)?;
    Ok(rec)
}

/// Additive zero-mean Gaussian noise on the phase voltages and currents.
pub fn add_noise(rec: &mut SimRecord, sigma_v: f64, sigma_i: f64, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = Normal::new(0.0, sigma_v).map_err(|e| Error::InvalidParameter(format!("sigma_v: {e}")))?;
    let ni = Normal::new(0.0, sigma_i).map_err(|e| Error::InvalidParameter(format!("sigma_i: {e}")))?;
    for s in &mut rec.samples {
        for v in &mut s.v {
            *v += nv.sample(&mut rng);
        }
        for i in &mut s.i {
            *i += ni.sample(&mut rng);
        }
    }
    Ok(())
}

/// Simulate, add noise, and decimate to `sim.f_sample`.
pub fn run_scenario(sc: &Scenario) -> Result<SimRecord> {
    let k = sc.decimation()?;
    Ok(simulate_measured(sc)?.decimate(k))
}
