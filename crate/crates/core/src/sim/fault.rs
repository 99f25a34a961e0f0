//! Terminal fault block and the nodal solve at the motor terminals.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    #[default]
    None,
    LineGround,
    LineLine,
    LineLineGround,
    ThreePhaseGround,
}

impl FaultKind {
    pub fn phase_count(self) -> usize {
        match self {
            FaultKind::None => 0,
            FaultKind::LineGround => 1,
            FaultKind::LineLine | FaultKind::LineLineGround => 2,
            FaultKind::ThreePhaseGround => 3,
        }
    }

    pub fn grounded(self) -> bool {
        matches!(self, FaultKind::LineGround | FaultKind::LineLineGround | FaultKind::ThreePhaseGround)
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FaultKind::None => "none",
            FaultKind::LineGround => "line_ground",
            FaultKind::LineLine => "line_line",
            FaultKind::LineLineGround => "line_line_ground",
            FaultKind::ThreePhaseGround => "three_phase_ground",
        };
        f.write_str(s)
    }
}

/// A shunt fault at the motor terminals, active on `[t_on, t_off)`.
///
/// Each faulted phase connects through `r_f` to a common star node; for ground
/// faults the star node connects to ground through `r_g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultSpec {
    pub kind: FaultKind,
    /// Faulted phases as letters, e.g. `"A"`, `"AB"`, `"ABC"`.
    pub phases: String,
    pub r_f: f64,
    pub r_g: f64,
    pub t_on: f64,
    pub t_off: f64,
}

impl Default for FaultSpec {
    fn default() -> Self {
        Self { kind: FaultKind::None, phases: String::new(), r_f: 5.0, r_g: 0.1, t_on: 5.0, t_off: 5.25 }
    }
}

impl FaultSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(kind: FaultKind, phases: &str) -> Self {
        Self { kind, phases: phases.to_string(), ..Self::default() }
    }

    /// Phase-selection mask parsed from `phases`.
    pub fn mask(&self) -> Result<[bool; 3]> {
        let mut mask = [false; 3];
        for ch in self.phases.chars() {
            let idx = match ch.to_ascii_uppercase() {
                'A' => 0,
                'B' => 1,
                'C' => 2,
                'G' => continue,
                other => return Err(Error::InvalidParameter(format!("fault.phases: unknown phase '{other}'"))),
            };
            if mask[idx] {
                return Err(Error::InvalidParameter(format!("fault.phases: '{ch}' listed twice")));
            }
            mask[idx] = true;
        }
        Ok(mask)
    }

    /// Short label such as `AG`, `AB` or `ABCG`.
    pub fn label(&self) -> String {
        if self.kind == FaultKind::None {
            return "--".into();
        }
        let mut s: String = self.phases.chars().filter(|c| *c != 'G' && *c != 'g').collect();
        s.make_ascii_uppercase();
        if self.kind.grounded() {
            s.push('G');
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == FaultKind::None {
            return Ok(());
        }
        let count = self.mask()?.iter().filter(|m| **m).count();
        if count != self.kind.phase_count() {
            return Err(Error::InvalidParameter(format!(
                "fault.phases '{}' has {count} phase(s), {} needs {}",
                self.phases,
                self.kind,
                self.kind.phase_count()
            )));
        }
        if !(self.r_f.is_finite() && self.r_f > 0.0) {
            return Err(Error::InvalidParameter(format!("fault.r_f must be > 0, got {}", self.r_f)));
        }
        if !(self.r_g.is_finite() && self.r_g >= 0.0) {
            return Err(Error::InvalidParameter(format!("fault.r_g must be >= 0, got {}", self.r_g)));
        }
        if !(self.t_on < self.t_off) {
            return Err(Error::InvalidParameter(format!(
                "fault.t_on ({}) must precede fault.t_off ({})",
                self.t_on, self.t_off
            )));
        }
        Ok(())
    }

    pub fn active(&self, t: f64) -> bool {
        self.kind != FaultKind::None && t >= self.t_on && t < self.t_off
    }
}

/// Norton conductance matrix of the fault network seen from the terminals, S.
///
/// The star node is eliminated: `G = diag(g_f) − g_f²·𝟙𝟙ᵀ/(k·g_f + g_g)` over
/// the `k` faulted phases, with `g_g = 0` for ungrounded faults and
/// `g_g = ∞` for a solidly grounded star.
pub fn fault_conductance(fs: &FaultSpec, t: f64) -> Matrix3<f64> {
    if !fs.active(t) {
        return Matrix3::zeros();
    }
    let mask = match fs.mask() {
        Ok(m) => m,
        Err(_) => return Matrix3::zeros(),
    };
    let g_f = 1.0 / fs.r_f;
    let k = mask.iter().filter(|m| **m).count() as f64;
    let coupling = if fs.kind.grounded() {
        if fs.r_g == 0.0 {
            0.0
        } else {
            g_f * g_f / (k * g_f + 1.0 / fs.r_g)
        }
    } else {
        g_f * g_f / (k * g_f)
    };
    let mut g = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            if mask[i] && mask[j] {
                g[(i, j)] = if i == j { g_f - coupling } else { -coupling };
            }
        }
    }
    g
}

/// Terminal voltages from KCL: `(I/R_src + G_f)·v = e/R_src − i_motor`.
pub fn terminal_solve(e_abc: [f64; 3], i_motor_abc: [f64; 3], g_f: &Matrix3<f64>, r_src: f64) -> Result<[f64; 3]> {
    if !(r_src > 0.0) {
        return Err(Error::InvalidParameter(format!("source.r_src must be > 0, got {r_src}")));
    }
    let y = 1.0 / r_src;
    let a = Matrix3::identity() * y + g_f;
    let rhs = Vector3::new(e_abc[0] * y - i_motor_abc[0], e_abc[1] * y - i_motor_abc[1], e_abc[2] * y - i_motor_abc[2]);
    let v = a.lu().solve(&rhs).ok_or(Error::SingularMatrix("terminal solve"))?;
    Ok([v[0], v[1], v[2]])
}
