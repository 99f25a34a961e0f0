//! End-to-end runs: simulate a scenario, estimate over the record, write the
//! output files.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::dse::{sliding_detection, summarize, Interval, IntervalSummary};
use crate::error::Result;
use crate::report::{write_window_csv, DetectionReport};
use crate::sim::{
    add_noise, simulate_clean, to_dq_series, write_current_csv, write_measurement_csv, write_truth_csv,
    write_voltage_csv, SimRecord,
};

pub const MEASUREMENTS_FILE: &str = "measurements.csv";
pub const TRUTH_FILE: &str = "truth.csv";
pub const WINDOWS_FILE: &str = "windows.csv";
pub const REPORT_FILE: &str = "report.toml";
pub const VOLTAGE_PLOT_FILE: &str = "plot_voltage.csv";
pub const CURRENT_PLOT_FILE: &str = "plot_current.csv";

/// Span of the waveform plot files, s.
pub const PLOT_SPAN: (f64, f64) = (4.5, 5.75);

pub struct SimOutput {
    /// Noise-free trajectory at the integration step.
    pub fine: SimRecord,
    /// Noisy record at the output sample rate.
    pub measured: SimRecord,
}

pub fn simulate(cfg: &RunConfig) -> Result<SimOutput> {
    let sc = cfg.scenario();
    sc.validate()?;
    let fine = simulate_clean(&sc)?;
    let mut noisy = fine.clone();
    add_noise(&mut noisy, sc.sigma_v(), sc.sigma_i()?, sc.sim.seed)?;
    let measured = noisy.decimate(sc.decimation()?);
    Ok(SimOutput { fine, measured })
}

/// Facts printed after a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub samples: usize,
    pub fine_steps: usize,
    /// Mean slip over the loaded interval before fault onset.
    pub slip: Option<f64>,
    pub fault: String,
}

pub fn sim_summary(cfg: &RunConfig, out: &SimOutput) -> SimSummary {
    let t_hi = cfg.fault.t_on.min(cfg.sim.t_end);
    let t_lo = cfg.load.t_load.max(t_hi - 0.5);
    let speeds: Vec<f64> =
        out.measured.samples.iter().filter(|s| s.t >= t_lo && s.t < t_hi).map(|s| s.omega_m).collect();
    let slip = (!speeds.is_empty()).then(|| {
        let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
        let sync = 2.0 * std::f64::consts::PI * cfg.source.f / cfg.motor.p();
        1.0 - mean / sync
    });
    let f = &cfg.fault;
    let fault = if f.kind == crate::sim::FaultKind::None {
        "none".to_string()
    } else {
        format!("{} ({}) on [{}, {}) s", f.kind, f.label(), f.t_on, f.t_off)
    };
    SimSummary { samples: out.measured.len(), fine_steps: out.fine.len(), slip, fault }
}

/// Pre-fault, fault, and post-fault spans of a record ending at `t_end`.
pub fn labeled_intervals(cfg: &RunConfig, t_end: f64) -> Vec<Interval> {
    let f = &cfg.fault;
    vec![
        Interval::new("pre-fault", 0.0, f.t_on, false),
        Interval::new("fault", f.t_on, f.t_off, false),
        Interval::new("post-fault", f.t_off, t_end, true),
    ]
}

pub fn estimate(cfg: &RunConfig, measured: &SimRecord) -> Result<DetectionReport> {
    let dse = cfg.dse_config()?;
    let series = to_dq_series(measured, &cfg.source.frame());
    let det = sliding_detection(&series, &cfg.motor, &dse)?;
    let t_end = measured.samples.last().map_or(0.0, |s| s.t);
    let summaries: Vec<IntervalSummary> =
        labeled_intervals(cfg, t_end).iter().map(|iv| summarize(&det, iv, dse.p_threshold)).collect();
    Ok(DetectionReport::new(cfg.resolved()?, &det, &summaries))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_simulation(out: &SimOutput, measurements: &Path, truth: Option<&Path>) -> Result<()> {
    write_measurement_csv(create(measurements)?, &out.measured)?;
    if let Some(path) = truth {
        write_truth_csv(create(path)?, &out.measured)?;
    }
    Ok(())
}

pub fn write_estimation(report: &DetectionReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_window_csv(create(&dir.join(WINDOWS_FILE))?, &report.windows)?;
    std::fs::write(dir.join(REPORT_FILE), report.to_toml()?)?;
    Ok(())
}

/// Files written by [`run`], relative to the output directory.
pub fn run_outputs(dir: &Path) -> Vec<PathBuf> {
    [MEASUREMENTS_FILE, TRUTH_FILE, WINDOWS_FILE, REPORT_FILE, VOLTAGE_PLOT_FILE, CURRENT_PLOT_FILE]
        .iter()
        .map(|f| dir.join(f))
        .collect()
}

/// Simulate, estimate, and write every output file into `dir`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<(SimOutput, DetectionReport)> {
    let out = simulate(cfg)?;
    std::fs::create_dir_all(dir)?;
    write_simulation(&out, &dir.join(MEASUREMENTS_FILE), Some(&dir.join(TRUTH_FILE)))?;
    let (t0, t1) = PLOT_SPAN;
    write_voltage_csv(create(&dir.join(VOLTAGE_PLOT_FILE))?, out.fine.between(t0, t1))?;
    write_current_csv(create(&dir.join(CURRENT_PLOT_FILE))?, out.fine.between(t0, t1))?;
    let report = estimate(cfg, &out.measured)?;
    write_estimation(&report, dir)?;
    Ok((out, report))
}
