//! Sliding-window detection over a measurement record.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::motor::MotorParams;
use crate::sim::DqSeries;

use super::config::DseConfig;
use super::residual::{ObservationWindow, STATES_PER_SAMPLE};
use super::solver::{gauss_newton_solve, EstimationResult, Verdict};

/// Outcome of one window; solver failures are kept in place.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowResult {
    pub start: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub warm_started: bool,
    pub outcome: std::result::Result<EstimationResult, String>,
}

impl WindowResult {
    pub fn verdict(&self) -> Option<Verdict> {
        self.outcome.as_ref().ok().map(|r| r.verdict)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub windows: Vec<WindowResult>,
    /// False when every window was solved from a cold start.
    pub warm_start: bool,
}

impl Detection {
    pub fn error_count(&self) -> usize {
        self.windows.iter().filter(|w| w.outcome.is_err()).count()
    }
}

/// Previous estimate advanced by `shift` samples, repeating the last sample
/// to fill the tail.
pub fn shift_estimate(x: &DVector<f64>, shift: usize) -> DVector<f64> {
    let n = x.len() / STATES_PER_SAMPLE;
    DVector::from_fn(x.len(), |i, _| {
        let (k, j) = (i / STATES_PER_SAMPLE, i % STATES_PER_SAMPLE);
        let src = (k + shift).min(n - 1);
        x[src * STATES_PER_SAMPLE + j]
    })
}

pub fn window_starts(len: usize, n: usize, stride: usize) -> Vec<usize> {
    if len < n {
        return Vec::new();
    }
    (0..=len - n).step_by(stride).collect()
}

fn solve_one(
    series: &DqSeries,
    start: usize,
    dt: f64,
    p: &MotorParams,
    cfg: &DseConfig,
    init: Option<&DVector<f64>>,
) -> WindowResult {
    let n = cfg.n;
    let outcome = ObservationWindow::from_series(series, start, n, dt)
        .and_then(|w| gauss_newton_solve(&w, p, cfg, init))
        .map_err(|e| e.to_string());
    WindowResult {
        start,
        t_start: series.t[start],
        t_end: series.t[start + n - 1],
        warm_started: init.is_some(),
        outcome,
    }
}

/// Run the estimator on every window of `cfg.n` samples advancing by
/// `cfg.stride`.
///
/// Overlapping windows are warm-started from the previous estimate. Disjoint
/// windows (`stride >= n`) and parallel runs use the seeded cold start for
/// every window, so each result depends only on its own samples.
pub fn sliding_detection(series: &DqSeries, p: &MotorParams, cfg: &DseConfig) -> Result<Detection> {
    cfg.validate()?;
    p.validate()?;
    if series.len() < cfg.n {
        return Err(Error::InvalidParameter(format!("series has {} samples, window needs {}", series.len(), cfg.n)));
    }
    let dt = series.spacing()?;
    let starts = window_starts(series.len(), cfg.n, cfg.stride);
    let warm = !cfg.parallel && cfg.stride < cfg.n;

    let windows = if cfg.parallel {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        let chunk = starts.len().div_ceil(threads).max(1);
        std::thread::scope(|s| {
            let handles: Vec<_> = starts
                .chunks(chunk)
                .map(|c| s.spawn(move || c.iter().map(|&k| solve_one(series, k, dt, p, cfg, None)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        })
    } else {
        let mut out: Vec<WindowResult> = Vec::with_capacity(starts.len());
        let mut prev: Option<DVector<f64>> = None;
        for &k in &starts {
            let init = if warm { prev.as_ref().map(|x| shift_estimate(x, cfg.stride)) } else { None };
            let res = solve_one(series, k, dt, p, cfg, init.as_ref());
            prev = res.outcome.as_ref().ok().map(|r| r.x.clone());
            out.push(res);
        }
        out
    };
    Ok(Detection { windows, warm_start: warm })
}

/// Labeled time span `[t0, t1)`, or `[t0, t1]` when `closed`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub label: String,
    pub t0: f64,
    pub t1: f64,
    pub closed: bool,
}

impl Interval {
    pub fn new(label: &str, t0: f64, t1: f64, closed: bool) -> Self {
        Self { label: label.to_string(), t0, t1, closed }
    }

    pub fn contains_window(&self, w: &WindowResult) -> bool {
        let end_ok = if self.closed { w.t_end <= self.t1 } else { w.t_end < self.t1 };
        w.t_start >= self.t0 && end_ok
    }
}

/// Statistics over the windows lying fully inside one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSummary {
    pub interval: Interval,
    pub windows: usize,
    pub errors: usize,
    pub fault_windows: usize,
    pub mean_j: f64,
    pub max_j: f64,
    pub mean_p: f64,
    pub max_p: f64,
    pub verdict: Verdict,
}

pub fn summarize(det: &Detection, interval: &Interval, p_threshold: f64) -> IntervalSummary {
    let inside: Vec<&WindowResult> = det.windows.iter().filter(|w| interval.contains_window(w)).collect();
    let ok: Vec<&EstimationResult> = inside.iter().filter_map(|w| w.outcome.as_ref().ok()).collect();
    let count = ok.len().max(1) as f64;
    let max_p = ok.iter().map(|r| r.p).fold(0.0, f64::max);
    IntervalSummary {
        interval: interval.clone(),
        windows: inside.len(),
        errors: inside.len() - ok.len(),
        fault_windows: ok.iter().filter(|r| r.verdict == Verdict::Fault).count(),
        mean_j: ok.iter().map(|r| r.j_cost).sum::<f64>() / count,
        max_j: ok.iter().map(|r| r.j_cost).fold(0.0, f64::max),
        mean_p: ok.iter().map(|r| r.p).sum::<f64>() / count,
        max_p,
        verdict: if !ok.is_empty() && max_p >= p_threshold { Verdict::Fault } else { Verdict::Healthy },
    }
}
