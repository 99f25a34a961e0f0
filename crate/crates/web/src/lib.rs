//! Browser demo: terminal-fault waveforms, sliding-window detection, and the
//! torque/slip characteristic.
//!
//! The plain functions here are the whole demo; the `wasm` module only wraps
//! them for JavaScript.

use motor_dse::config::RunConfig;
use motor_dse::dse::chi_squared_cdf;
use motor_dse::motor::{equivalent_circuit_torque, steady_state_oracle_with_source};
use motor_dse::pipeline;
use motor_dse::sim::{simulate_clean, FaultKind, FaultSpec};
use motor_dse::{Error, Result};

/// Plot span around the fault, s.
pub const WAVE_SPAN: (f64, f64) = (4.9, 5.4);
/// Keep every k-th integration step in the waveform view.
pub const WAVE_STRIDE: usize = 4;

/// Faulted phases for a fault kind name as used in config files.
pub fn fault_from_name(kind: &str) -> Result<FaultSpec> {
    let (kind, phases) = match kind {
        "none" => (FaultKind::None, ""),
        "line_ground" => (FaultKind::LineGround, "A"),
        "line_line" => (FaultKind::LineLine, "AB"),
        "three_phase_ground" => (FaultKind::ThreePhaseGround, "ABC"),
        other => return Err(Error::Config(format!("unknown fault kind '{other}'"))),
    };
    Ok(FaultSpec::new(kind, phases))
}

fn scenario_config(kind: &str, load_torque: f64) -> Result<RunConfig> {
    let mut cfg = RunConfig { fault: fault_from_name(kind)?, ..RunConfig::default() };
    cfg.load.t_m = load_torque;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Waveforms {
    pub t: Vec<f64>,
    pub va: Vec<f64>,
    pub vb: Vec<f64>,
    pub vc: Vec<f64>,
    pub ia: Vec<f64>,
    pub ib: Vec<f64>,
    pub ic: Vec<f64>,
    /// Shaft speed, rpm.
    pub speed: Vec<f64>,
}

/// Noise-free terminal waveforms around the fault window.
pub fn waveforms(kind: &str, load_torque: f64) -> Result<Waveforms> {
    let cfg = scenario_config(kind, load_torque)?;
    let mut sc = cfg.scenario();
    sc.sim.t_end = WAVE_SPAN.1;
    let rec = simulate_clean(&sc)?;
    let mut w = Waveforms::default();
    for s in rec.between(WAVE_SPAN.0, WAVE_SPAN.1).step_by(WAVE_STRIDE) {
        w.t.push(s.t);
        w.va.push(s.v[0]);
        w.vb.push(s.v[1]);
        w.vc.push(s.v[2]);
        w.ia.push(s.i[0]);
        w.ib.push(s.i[1]);
        w.ic.push(s.i[2]);
        w.speed.push(s.omega_m * 60.0 / (2.0 * std::f64::consts::PI));
    }
    Ok(w)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionTrace {
    pub t_start: Vec<f64>,
    pub cost: Vec<f64>,
    pub p: Vec<f64>,
    /// 1 for Fault, 0 for Healthy, -1 for a failed solve.
    pub verdict: Vec<f64>,
    /// Cost at which p reaches the threshold.
    pub threshold_cost: f64,
    pub dof: usize,
    pub fault_windows: usize,
}

/// Smallest J with `chi_squared_cdf(J, dof) >= p`.
pub fn chi_squared_quantile(p: f64, dof: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("quantile needs p in [0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (0.0, dof as f64 + 10.0);
    while chi_squared_cdf(hi, dof)? < p {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if chi_squared_cdf(mid, dof)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Simulate a noisy record and run the sliding-window detector over it.
pub fn detect(kind: &str, load_torque: f64, window: usize, seed: u64) -> Result<DetectionTrace> {
    let mut cfg = scenario_config(kind, load_torque)?;
    cfg.dse.n = window;
    cfg.sim.seed = seed;
    cfg.validate()?;
    let out = pipeline::simulate(&cfg)?;
    let report = pipeline::estimate(&cfg, &out.measured)?;
    let dse = cfg.dse_config()?;
    let dof = motor_dse::dse::residual_rows(dse.n, dse.include_speed_residual) - motor_dse::dse::state_dim(dse.n);
    let mut trace = DetectionTrace {
        threshold_cost: chi_squared_quantile(dse.p_threshold, dof)?,
        dof,
        fault_windows: report.summary.fault_windows,
        ..DetectionTrace::default()
    };
    for w in &report.windows {
        trace.t_start.push(w.t_start);
        trace.cost.push(w.j.unwrap_or(f64::NAN));
        trace.p.push(w.p.unwrap_or(f64::NAN));
        trace.verdict.push(match w.verdict.as_str() {
            "Fault" => 1.0,
            "Healthy" => 0.0,
            _ => -1.0,
        });
    }
    Ok(trace)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TorqueSlip {
    pub slip: Vec<f64>,
    pub torque: Vec<f64>,
    /// Load plus friction torque at each slip.
    pub load: Vec<f64>,
    /// Operating slip, or NaN when the load exceeds breakdown torque.
    pub operating_slip: f64,
}

/// Equivalent-circuit torque over slip in (0, 1] at the given supply.
pub fn torque_slip(v_ll: f64, r_src: f64, load_torque: f64, points: usize) -> Result<TorqueSlip> {
    if points < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let cfg = RunConfig::default();
    let (p, f) = (cfg.motor, cfg.source.f);
    let w_sync = 2.0 * std::f64::consts::PI * f / p.p();
    let mut out = TorqueSlip {
        operating_slip: steady_state_oracle_with_source(&p, v_ll, f, load_torque, r_src).map_or(f64::NAN, |s| s.slip),
        ..TorqueSlip::default()
    };
    for k in 1..=points {
        let s = k as f64 / points as f64;
        out.slip.push(s);
        out.torque.push(equivalent_circuit_torque(&p, v_ll, f, r_src, s));
        out.load.push(load_torque + p.friction * (1.0 - s) * w_sync);
    }
    Ok(out)
}

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::*;

    fn js(e: motor_dse::Error) -> JsError {
        JsError::new(&e.to_string())
    }

    #[wasm_bindgen]
    pub struct Waveforms(super::Waveforms);

    #[wasm_bindgen]
    impl Waveforms {
        #[wasm_bindgen(getter)]
        pub fn t(&self) -> Vec<f64> {
            self.0.t.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn va(&self) -> Vec<f64> {
            self.0.va.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn vb(&self) -> Vec<f64> {
            self.0.vb.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn vc(&self) -> Vec<f64> {
            self.0.vc.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn ia(&self) -> Vec<f64> {
            self.0.ia.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn ib(&self) -> Vec<f64> {
            self.0.ib.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn ic(&self) -> Vec<f64> {
            self.0.ic.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn speed(&self) -> Vec<f64> {
            self.0.speed.clone()
        }
    }

    #[wasm_bindgen]
    pub fn waveforms(kind: &str, load_torque: f64) -> Result<Waveforms, JsError> {
        super::waveforms(kind, load_torque).map(Waveforms).map_err(js)
    }

    #[wasm_bindgen]
    pub struct DetectionTrace(super::DetectionTrace);

    #[wasm_bindgen]
    impl DetectionTrace {
        #[wasm_bindgen(getter)]
        pub fn t_start(&self) -> Vec<f64> {
            self.0.t_start.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn cost(&self) -> Vec<f64> {
            self.0.cost.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn p(&self) -> Vec<f64> {
            self.0.p.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn verdict(&self) -> Vec<f64> {
            self.0.verdict.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn threshold_cost(&self) -> f64 {
            self.0.threshold_cost
        }
        #[wasm_bindgen(getter)]
        pub fn dof(&self) -> usize {
            self.0.dof
        }
        #[wasm_bindgen(getter)]
        pub fn fault_windows(&self) -> usize {
            self.0.fault_windows
        }
    }

    #[wasm_bindgen]
    pub fn detect(kind: &str, load_torque: f64, window: usize, seed: u64) -> Result<DetectionTrace, JsError> {
        super::detect(kind, load_torque, window, seed).map(DetectionTrace).map_err(js)
    }

    #[wasm_bindgen]
    pub struct TorqueSlip(super::TorqueSlip);

    #[wasm_bindgen]
    impl TorqueSlip {
        #[wasm_bindgen(getter)]
        pub fn slip(&self) -> Vec<f64> {
            self.0.slip.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn torque(&self) -> Vec<f64> {
            self.0.torque.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn load(&self) -> Vec<f64> {
            self.0.load.clone()
        }
        #[wasm_bindgen(getter)]
        pub fn operating_slip(&self) -> f64 {
            self.0.operating_slip
        }
    }

    #[wasm_bindgen]
    pub fn torque_slip(v_ll: f64, r_src: f64, load_torque: f64, points: usize) -> Result<TorqueSlip, JsError> {
        super::torque_slip(v_ll, r_src, load_torque, points).map(TorqueSlip).map_err(js)
    }
}
