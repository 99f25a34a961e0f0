//! Weighted measurement residual of one observation window.
//!
//! State layout (sample-major, six entries per sample):
//! `[λqs, λds, λqr, λdr, Te, ωr]` for samples `0..N`.
//!
//! Row layout: five rows per sample `[vq, vd, iq, id, torque]` for all
//! samples first, then per interval `k = 1..N` the four flux rows
//! `[qs, ds, qr, dr]` followed by the speed row when enabled.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::motor::MotorParams;
use crate::sim::DqSeries;

use super::config::DseConfig;

pub const STATES_PER_SAMPLE: usize = 6;
pub const ROWS_PER_SAMPLE: usize = 5;

/// N aligned samples of synchronous-frame measurements.
#[derive(Debug, Clone, Copy)]
pub struct ObservationWindow<'a> {
    pub t: &'a [f64],
    pub vq: &'a [f64],
    pub vd: &'a [f64],
    pub iq: &'a [f64],
    pub id: &'a [f64],
    /// Load torque, a known input held constant between samples.
    pub t_m: &'a [f64],
    /// Frame speed, electrical rad/s.
    pub omega: f64,
    pub dt: f64,
}

impl<'a> ObservationWindow<'a> {
    /// Samples `start..start + n` of `series`.
    pub fn from_series(series: &'a DqSeries, start: usize, n: usize, dt: f64) -> Result<Self> {
        let end = start + n;
        if end > series.len() {
            return Err(Error::DimensionMismatch { expected: end, actual: series.len() });
        }
        let w = Self {
            t: &series.t[start..end],
            vq: &series.vq[start..end],
            vd: &series.vd[start..end],
            iq: &series.iq[start..end],
            id: &series.id[start..end],
            t_m: &series.t_m[start..end],
            omega: series.omega,
            dt,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!("window needs at least 2 samples, got {n}")));
        }
        for len in [self.vq.len(), self.vd.len(), self.iq.len(), self.id.len(), self.t_m.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, actual: len });
            }
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("window spacing must be positive".into()));
        }
        Ok(())
    }
}

pub fn state_dim(n: usize) -> usize {
    STATES_PER_SAMPLE * n
}

pub fn residual_rows(n: usize, include_speed: bool) -> usize {
    let per_interval = if include_speed { 5 } else { 4 };
    ROWS_PER_SAMPLE * n + per_interval * (n - 1)
}

#[derive(Clone, Copy)]
struct Sample {
    lqs: f64,
    lds: f64,
    lqr: f64,
    ldr: f64,
    t_e: f64,
    omega_r: f64,
    iqs: f64,
    ids: f64,
    iqr: f64,
    idr: f64,
}

/// Machine constants hoisted out of the row loop.
struct Coeffs {
    r_s: f64,
    r_r: f64,
    l_s: f64,
    l_r: f64,
    l_m: f64,
    det: f64,
    torque_k: f64,
    poles: f64,
    inertia: f64,
    friction: f64,
}

impl Coeffs {
    fn new(p: &MotorParams) -> Result<Self> {
        let det = p.checked_det()?;
        Ok(Self {
            r_s: p.r_s,
            r_r: p.r_r,
            l_s: p.l_s(),
            l_r: p.l_r(),
            l_m: p.l_m,
            det,
            torque_k: 1.5 * p.p() * p.l_m / det,
            poles: p.p(),
            inertia: p.inertia,
            friction: p.friction,
        })
    }

    fn sample(&self, x: &[f64]) -> Sample {
        let (lqs, lds, lqr, ldr) = (x[0], x[1], x[2], x[3]);
        Sample {
            lqs,
            lds,
            lqr,
            ldr,
            t_e: x[4],
            omega_r: x[5],
            iqs: (self.l_r * lqs - self.l_m * lqr) / self.det,
            ids: (self.l_r * lds - self.l_m * ldr) / self.det,
            iqr: (self.l_s * lqr - self.l_m * lqs) / self.det,
            idr: (self.l_s * ldr - self.l_m * lds) / self.det,
        }
    }
}

/// Weighted residual `ε = (y − h(x)) / σ` for one window.
pub fn build_residual(
    x: &DVector<f64>,
    w: &ObservationWindow,
    p: &MotorParams,
    cfg: &DseConfig,
) -> Result<DVector<f64>> {
    w.validate()?;
    let n = w.len();
    if x.len() != state_dim(n) {
        return Err(Error::DimensionMismatch { expected: state_dim(n), actual: x.len() });
    }
    let c = Coeffs::new(p)?;
    let sg = &cfg.weights;
    let om = w.omega;
    let xs = x.as_slice();
    let samples: Vec<Sample> = xs.chunks_exact(STATES_PER_SAMPLE).map(|s| c.sample(s)).collect();

    let mut r = DVector::zeros(residual_rows(n, cfg.include_speed_residual));
    for (k, s) in samples.iter().enumerate() {
        let row = ROWS_PER_SAMPLE * k;
        r[row] = (w.vq[k] - (c.r_s * s.iqs + om * s.lds)) / sg.voltage;
        r[row + 1] = (w.vd[k] - (c.r_s * s.ids - om * s.lqs)) / sg.voltage;
        r[row + 2] = (w.iq[k] - s.iqs) / sg.current;
        r[row + 3] = (w.id[k] - s.ids) / sg.current;
        r[row + 4] = -(s.t_e - c.torque_k * (s.lqs * s.ldr - s.lqr * s.lds)) / sg.torque;
    }

    let h = 0.5 * w.dt;
    let mut row = ROWS_PER_SAMPLE * n;
    // The load torque is held from the left sample over each interval, so a
    // load step on a sample instant integrates exactly.
    let deriv = |k: usize, s: &Sample, t_m: f64| {
        let slip = om - s.omega_r;
        [
            w.vq[k] - om * s.lds - c.r_s * s.iqs,
            w.vd[k] + om * s.lqs - c.r_s * s.ids,
            -slip * s.ldr - c.r_r * s.iqr,
            slip * s.lqr - c.r_r * s.idr,
            c.poles / c.inertia * (s.t_e - c.friction * s.omega_r / c.poles - t_m),
        ]
    };
    for k in 1..n {
        let (a, b) = (&samples[k - 1], &samples[k]);
        let held = w.t_m[k - 1];
        let (fa, fb) = (deriv(k - 1, a, held), deriv(k, b, held));
        let da = [a.lqs, a.lds, a.lqr, a.ldr, a.omega_r];
        let db = [b.lqs, b.lds, b.lqr, b.ldr, b.omega_r];
        for j in 0..4 {
            r[row + j] = -(db[j] - da[j] - h * (fa[j] + fb[j])) / sg.flux;
        }
        row += 4;
        if cfg.include_speed_residual {
            r[row] = -(db[4] - da[4] - h * (fa[4] + fb[4])) / sg.speed;
            row += 1;
        }
    }
    Ok(r)
}
