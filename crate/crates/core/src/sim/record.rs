//! Measurement CSV files and the synchronous-frame view of a record.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::frame::{park, FrameAngle};

use super::{SimRecord, SimSample};

pub const MEASUREMENT_HEADER: [&str; 9] = ["t", "va", "vb", "vc", "ia", "ib", "ic", "Tm", "wm"];
pub const TRUTH_HEADER: [&str; 7] = ["t", "lqs", "lds", "lqr", "ldr", "Te", "wm"];

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

fn write_rows<W: Write, const N: usize>(out: W, header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        // Shortest round-trip formatting: every value reparses bit-exactly.
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_measurement_csv<W: Write>(out: W, rec: &SimRecord) -> Result<()> {
    write_rows(
        out,
        MEASUREMENT_HEADER,
        rec.samples.iter().map(|s| [s.t, s.v[0], s.v[1], s.v[2], s.i[0], s.i[1], s.i[2], s.t_m, s.omega_m]),
    )
}

pub fn write_truth_csv<W: Write>(out: W, rec: &SimRecord) -> Result<()> {
    write_rows(
        out,
        TRUTH_HEADER,
        rec.samples.iter().map(|s| {
            let f = s.truth.flux;
            [s.t, f.lqs, f.lds, f.lqr, f.ldr, s.truth.t_e, s.omega_m]
        }),
    )
}

pub const VOLTAGE_PLOT_HEADER: [&str; 4] = ["t", "va", "vb", "vc"];
pub const CURRENT_PLOT_HEADER: [&str; 4] = ["t", "ia", "ib", "ic"];

/// Per-phase voltages of `samples`, one row per sample.
pub fn write_voltage_csv<'a, W: Write>(out: W, samples: impl Iterator<Item = &'a SimSample>) -> Result<()> {
    write_rows(out, VOLTAGE_PLOT_HEADER, samples.map(|s| [s.t, s.v[0], s.v[1], s.v[2]]))
}

/// Per-phase currents of `samples`, one row per sample.
pub fn write_current_csv<'a, W: Write>(out: W, samples: impl Iterator<Item = &'a SimSample>) -> Result<()> {
    write_rows(out, CURRENT_PLOT_HEADER, samples.map(|s| [s.t, s.i[0], s.i[1], s.i[2]]))
}

/// Parse a measurement CSV. The header must match [`MEASUREMENT_HEADER`]
/// exactly; ground truth is left at zero.
pub fn read_measurement_csv<R: Read>(input: R) -> Result<SimRecord> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    for (i, want) in MEASUREMENT_HEADER.iter().enumerate() {
        match header.get(i) {
            Some(got) if got == *want => {}
            Some(got) => return Err(Error::Csv(format!("column {} must be '{want}', found '{got}'", i + 1))),
            None => return Err(Error::Csv(format!("missing column '{want}'"))),
        }
    }
    if header.len() > MEASUREMENT_HEADER.len() {
        return Err(Error::Csv(format!("unexpected extra column '{}'", &header[MEASUREMENT_HEADER.len()])));
    }
    let mut samples = Vec::new();
    for (line, row) in r.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let mut vals = [0.0; 9];
        for (j, v) in vals.iter_mut().enumerate() {
            let cell = row
                .get(j)
                .ok_or_else(|| Error::Csv(format!("row {}: missing column '{}'", line + 2, MEASUREMENT_HEADER[j])))?;
            *v = cell.trim().parse().map_err(|_| {
                Error::Csv(format!("row {}: column '{}' is not a number: '{cell}'", line + 2, MEASUREMENT_HEADER[j]))
            })?;
        }
        samples.push(SimSample {
            t: vals[0],
            v: [vals[1], vals[2], vals[3]],
            i: [vals[4], vals[5], vals[6]],
            t_m: vals[7],
            omega_m: vals[8],
            ..Default::default()
        });
    }
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::Csv("time column must be strictly increasing".into()));
    }
    Ok(SimRecord { samples })
}

/// Measurements in the synchronous frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DqSeries {
    pub t: Vec<f64>,
    pub vq: Vec<f64>,
    pub vd: Vec<f64>,
    pub v0: Vec<f64>,
    pub iq: Vec<f64>,
    pub id: Vec<f64>,
    pub i0: Vec<f64>,
    pub t_m: Vec<f64>,
    pub omega_m: Vec<f64>,
    /// Frame speed, electrical rad/s.
    pub omega: f64,
}

impl DqSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Sample spacing, checked for uniformity.
    pub fn spacing(&self) -> Result<f64> {
        if self.t.len() < 2 {
            return Err(Error::InvalidParameter("series needs at least two samples".into()));
        }
        let dt = self.t[1] - self.t[0];
        let uniform = self.t.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-6 * dt);
        if !(dt > 0.0) || !uniform {
            return Err(Error::InvalidParameter("series must be uniformly sampled".into()));
        }
        Ok(dt)
    }
}

pub fn to_dq_series(rec: &SimRecord, fr: &FrameAngle) -> DqSeries {
    let n = rec.len();
    let mut out = DqSeries {
        t: Vec::with_capacity(n),
        vq: Vec::with_capacity(n),
        vd: Vec::with_capacity(n),
        v0: Vec::with_capacity(n),
        iq: Vec::with_capacity(n),
        id: Vec::with_capacity(n),
        i0: Vec::with_capacity(n),
        t_m: Vec::with_capacity(n),
        omega_m: Vec::with_capacity(n),
        omega: fr.omega,
    };
    for s in &rec.samples {
        let theta = fr.angle(s.t);
        let [vq, vd, v0] = park(theta, s.v);
        let [iq, id, i0] = park(theta, s.i);
        out.t.push(s.t);
        out.vq.push(vq);
        out.vd.push(vd);
        out.v0.push(v0);
        out.iq.push(iq);
        out.id.push(id);
        out.i0.push(i0);
        out.t_m.push(s.t_m);
        out.omega_m.push(s.omega_m);
    }
    out
}
