//! Detection report (TOML) and per-window results CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::dse::{Detection, IntervalSummary, Verdict, WindowResult};
use crate::error::{Error, Result};

pub const WINDOW_HEADER: [&str; 8] = ["t_start", "t_end", "iterations", "converged", "J", "dof", "p", "verdict"];

/// Verdict text for a window whose solve failed.
pub const ERROR_VERDICT: &str = "Error";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub windows: usize,
    pub errors: usize,
    pub fault_windows: usize,
    /// `"warm"` when overlapping windows were warm-started, `"cold"` when
    /// every window started from the seeded initial state.
    pub start_mode: String,
    /// Fault when any labeled interval is Fault.
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalRow {
    pub label: String,
    pub t0: f64,
    pub t1: f64,
    pub windows: usize,
    pub errors: usize,
    pub fault_windows: usize,
    pub mean_j: f64,
    pub max_j: f64,
    pub mean_p: f64,
    pub max_p: f64,
    pub verdict: String,
}

impl From<&IntervalSummary> for IntervalRow {
    fn from(s: &IntervalSummary) -> Self {
        Self {
            label: s.interval.label.clone(),
            t0: s.interval.t0,
            t1: s.interval.t1,
            windows: s.windows,
            errors: s.errors,
            fault_windows: s.fault_windows,
            mean_j: s.mean_j,
            max_j: s.max_j,
            mean_p: s.mean_p,
            max_p: s.max_p,
            verdict: s.verdict.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRow {
    pub t_start: f64,
    pub t_end: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dof: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&WindowResult> for WindowRow {
    fn from(w: &WindowResult) -> Self {
        match &w.outcome {
            Ok(r) => Self {
                t_start: w.t_start,
                t_end: w.t_end,
                iterations: Some(r.iterations),
                converged: Some(r.converged),
                j: Some(r.j_cost),
                dof: Some(r.dof),
                p: Some(r.p),
                verdict: r.verdict.to_string(),
                error: None,
            },
            Err(e) => Self {
                t_start: w.t_start,
                t_end: w.t_end,
                iterations: None,
                converged: None,
                j: None,
                dof: None,
                p: None,
                verdict: ERROR_VERDICT.to_string(),
                error: Some(e.clone()),
            },
        }
    }
}

/// Everything needed to audit one estimation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionReport {
    pub summary: Summary,
    /// Resolved configuration; reparses to the run's settings.
    pub config: RunConfig,
    #[serde(rename = "interval")]
    pub intervals: Vec<IntervalRow>,
    #[serde(rename = "window")]
    pub windows: Vec<WindowRow>,
}

impl DetectionReport {
    pub fn new(config: RunConfig, det: &Detection, intervals: &[IntervalSummary]) -> Self {
        let any_fault = intervals.iter().any(|s| s.verdict == Verdict::Fault);
        Self {
            summary: Summary {
                windows: det.windows.len(),
                errors: det.error_count(),
                fault_windows: det.windows.iter().filter(|w| w.verdict() == Some(Verdict::Fault)).count(),
                start_mode: if det.warm_start { "warm" } else { "cold" }.to_string(),
                verdict: if any_fault { Verdict::Fault } else { Verdict::Healthy }.to_string(),
            },
            config,
            intervals: intervals.iter().map(IntervalRow::from).collect(),
            windows: det.windows.iter().map(WindowRow::from).collect(),
        }
    }

    pub fn fault_detected(&self) -> bool {
        self.summary.verdict == Verdict::Fault.to_string()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("report serialization: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_window_csv<W: Write>(out: W, rows: &[WindowRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(WINDOW_HEADER).map_err(err)?;
    for r in rows {
        w.write_record([
            r.t_start.to_string(),
            r.t_end.to_string(),
            opt(r.iterations),
            opt(r.converged),
            opt(r.j),
            opt(r.dof),
            opt(r.p),
            r.verdict.clone(),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
