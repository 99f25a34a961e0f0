//! Fifth-order induction machine in the synchronous qd frame.
//!
//! Flux linkages are in volt-seconds, `pole_pairs` is the number of pole
//! pairs, and the rotor electrical speed is `ω_r = pole_pairs · ω_m`. Rotor
//! quantities are referred to the stator and the rotor windings are shorted
//! (squirrel cage).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::peak_phase_voltage;

/// Parameters with `L_s·L_r − L_m²` at or below this value are rejected.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotorParams {
    /// Stator resistance, Ω.
    pub r_s: f64,
    /// Stator leakage inductance, H.
    pub l_ls: f64,
    /// Rotor resistance referred to the stator, Ω.
    pub r_r: f64,
    /// Rotor leakage inductance referred to the stator, H.
    pub l_lr: f64,
    /// Magnetizing inductance, H.
    pub l_m: f64,
    pub pole_pairs: u32,
    /// Combined rotor and load inertia, kg·m².
    pub inertia: f64,
    /// Viscous friction, N·m·s.
    pub friction: f64,
    /// Nominal frequency, Hz.
    pub f_nom: f64,
    /// Nominal line-line rms voltage, V.
    pub v_ll: f64,
    /// Nominal shaft power, W.
    pub p_nom: f64,
}

impl Default for MotorParams {
    /// 5 hp, 460 V, 60 Hz, four-pole machine.
    fn default() -> Self {
        Self {
            r_s: 1.115,
            l_ls: 5.974e-3,
            r_r: 1.083,
            l_lr: 5.974e-3,
            l_m: 203.7e-3,
            pole_pairs: 2,
            inertia: 0.02,
            friction: 0.005752,
            f_nom: 60.0,
            v_ll: 460.0,
            p_nom: 3730.0,
        }
    }
}

impl MotorParams {
    pub fn l_s(&self) -> f64 {
        self.l_ls + self.l_m
    }

    pub fn l_r(&self) -> f64 {
        self.l_lr + self.l_m
    }

    /// Determinant `L_s·L_r − L_m²` of the flux/current map.
    pub fn det(&self) -> f64 {
        self.l_s() * self.l_r() - self.l_m * self.l_m
    }

    pub fn p(&self) -> f64 {
        f64::from(self.pole_pairs)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("r_s", self.r_s),
            ("l_ls", self.l_ls),
            ("r_r", self.r_r),
            ("l_lr", self.l_lr),
            ("l_m", self.l_m),
            ("inertia", self.inertia),
            ("f_nom", self.f_nom),
            ("v_ll", self.v_ll),
            ("p_nom", self.p_nom),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("motor.{name} must be > 0, got {v}")));
            }
        }
        if self.pole_pairs < 1 {
            return Err(Error::InvalidParameter("motor.pole_pairs must be >= 1".into()));
        }
        if !(self.friction.is_finite() && self.friction >= 0.0) {
            return Err(Error::InvalidParameter(format!("motor.friction must be >= 0, got {}", self.friction)));
        }
        self.checked_det().map(|_| ())
    }

    pub fn checked_det(&self) -> Result<f64> {
        let d = self.det();
        if d > DEGENERACY_TOL {
            Ok(d)
        } else {
            Err(Error::DegenerateParameters(format!("L_s*L_r - L_m^2 = {d:e}")))
        }
    }

    /// Synchronous mechanical speed at nominal frequency, rad/s.
    pub fn synchronous_mech_speed(&self) -> f64 {
        2.0 * PI * self.f_nom / self.p()
    }

    /// Shaft torque at nominal power and synchronous speed, N·m.
    pub fn rated_torque(&self) -> f64 {
        self.p_nom / self.synchronous_mech_speed()
    }
}

/// Stator and rotor flux linkages, V·s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElectricalState {
    pub lqs: f64,
    pub lds: f64,
    pub lqr: f64,
    pub ldr: f64,
}

impl ElectricalState {
    pub fn new(lqs: f64, lds: f64, lqr: f64, ldr: f64) -> Self {
        Self { lqs, lds, lqr, ldr }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MechanicalState {
    /// Shaft speed, mechanical rad/s.
    pub omega_m: f64,
}

impl MechanicalState {
    pub fn omega_r(&self, p: &MotorParams) -> f64 {
        p.p() * self.omega_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DqCurrents {
    pub iqs: f64,
    pub ids: f64,
    pub iqr: f64,
    pub idr: f64,
}

/// Time derivatives of the four fluxes and the shaft speed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub lqs: f64,
    pub lds: f64,
    pub lqr: f64,
    pub ldr: f64,
    pub omega_m: f64,
}

pub fn currents_from_fluxes(p: &MotorParams, es: &ElectricalState) -> Result<DqCurrents> {
    let d = p.checked_det()?;
    let (ls, lr, lm) = (p.l_s(), p.l_r(), p.l_m);
    Ok(DqCurrents {
        iqs: (lr * es.lqs - lm * es.lqr) / d,
        ids: (lr * es.lds - lm * es.ldr) / d,
        iqr: (ls * es.lqr - lm * es.lqs) / d,
        idr: (ls * es.ldr - lm * es.lds) / d,
    })
}

pub fn fluxes_from_currents(p: &MotorParams, c: &DqCurrents) -> ElectricalState {
    let (ls, lr, lm) = (p.l_s(), p.l_r(), p.l_m);
    ElectricalState {
        lqs: ls * c.iqs + lm * c.iqr,
        lds: ls * c.ids + lm * c.idr,
        lqr: lr * c.iqr + lm * c.iqs,
        ldr: lr * c.idr + lm * c.ids,
    }
}

/// Electromagnetic torque from the four fluxes, N·m.
pub fn electrical_torque(p: &MotorParams, es: &ElectricalState) -> Result<f64> {
    let d = p.checked_det()?;
    Ok(1.5 * p.p() * p.l_m / d * (es.lqs * es.ldr - es.lqr * es.lds))
}

/// Electromagnetic torque from stator flux and stator current, N·m.
pub fn electrical_torque_from_currents(p: &MotorParams, es: &ElectricalState, c: &DqCurrents) -> f64 {
    1.5 * p.p() * (es.lds * c.iqs - es.lqs * c.ids)
}

/// Right-hand side of the machine equations with shorted rotor windings.
///
/// `omega` is the frame (synchronous) speed in electrical rad/s and `t_m` the
/// load torque opposing rotation.
pub fn state_derivative(
    p: &MotorParams,
    es: &ElectricalState,
    ms: &MechanicalState,
    v_qs: f64,
    v_ds: f64,
    omega: f64,
    t_m: f64,
) -> Result<StateDerivative> {
    let i = currents_from_fluxes(p, es)?;
    let t_e = electrical_torque(p, es)?;
    let slip_speed = omega - ms.omega_r(p);
    Ok(StateDerivative {
        lqs: v_qs - omega * es.lds - p.r_s * i.iqs,
        lds: v_ds + omega * es.lqs - p.r_s * i.ids,
        lqr: -slip_speed * es.ldr - p.r_r * i.iqr,
        ldr: slip_speed * es.lqr - p.r_r * i.idr,
        omega_m: (t_e - p.friction * ms.omega_m - t_m) / p.inertia,
    })
}

/// Balanced steady-state operating point from the per-phase equivalent circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub slip: f64,
    pub i_stator_rms: f64,
    pub t_e: f64,
    pub omega_m: f64,
}

struct EquivalentCircuit {
    v_ph: f64,
    r_series: f64,
    x_ls: f64,
    x_lr: f64,
    x_m: f64,
    r_r: f64,
    omega_sync_mech: f64,
}

impl EquivalentCircuit {
    fn new(p: &MotorParams, v_ll: f64, f: f64, r_src: f64) -> Self {
        let w = 2.0 * PI * f;
        Self {
            v_ph: peak_phase_voltage(v_ll) / 2f64.sqrt(),
            r_series: p.r_s + r_src,
            x_ls: w * p.l_ls,
            x_lr: w * p.l_lr,
            x_m: w * p.l_m,
            r_r: p.r_r,
            omega_sync_mech: w / p.p(),
        }
    }

    /// Stator current phasor and electromagnetic torque at slip `s`.
    fn solve(&self, s: f64) -> (Complex64, f64) {
        let jxm = Complex64::new(0.0, self.x_m);
        let zs = Complex64::new(self.r_series, self.x_ls);
        if s.abs() < 1e-300 {
            let i_s = self.v_ph / (zs + jxm);
            return (i_s, 0.0);
        }
        let zr = Complex64::new(self.r_r / s, self.x_lr);
        let zin = zs + jxm * zr / (jxm + zr);
        let i_s = self.v_ph / zin;
        let i_r = i_s * jxm / (jxm + zr);
        let torque = 3.0 * i_r.norm_sqr() * self.r_r / s / self.omega_sync_mech;
        (i_s, torque)
    }
}

/// Torque/slip characteristic of the equivalent circuit, N·m.
pub fn equivalent_circuit_torque(p: &MotorParams, v_ll: f64, f: f64, r_src: f64, slip: f64) -> f64 {
    EquivalentCircuit::new(p, v_ll, f, r_src).solve(slip).1
}

/// Slip at which the equivalent-circuit torque balances `t_m + F·ω_m`.
pub fn steady_state_oracle(p: &MotorParams, v_ll: f64, f: f64, t_m: f64) -> Result<SteadyState> {
    steady_state_oracle_with_source(p, v_ll, f, t_m, 0.0)
}

/// As [`steady_state_oracle`] with a resistive source impedance `r_src` in
/// series with the stator.
pub fn steady_state_oracle_with_source(
    p: &MotorParams,
    v_ll: f64,
    f: f64,
    t_m: f64,
    r_src: f64,
) -> Result<SteadyState> {
    p.validate()?;
    if !(v_ll > 0.0 && f > 0.0 && r_src >= 0.0) {
        return Err(Error::InvalidParameter("oracle needs v_ll > 0, f > 0, r_src >= 0".into()));
    }
    let ckt = EquivalentCircuit::new(p, v_ll, f, r_src);
    let w_sync = ckt.omega_sync_mech;
    let balance = |s: f64| ckt.solve(s).1 - t_m - p.friction * (1.0 - s) * w_sync;
    let point = |s: f64| {
        let (i_s, t_e) = ckt.solve(s);
        SteadyState { slip: s, i_stator_rms: i_s.norm(), t_e, omega_m: (1.0 - s) * w_sync }
    };

    if balance(0.0) >= 0.0 {
        return Ok(point(0.0));
    }

    // Golden-section search for the peak of the balance function on (0, 1).
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (balance(x1), balance(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = balance(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = balance(x1);
        }
    }
    let s_peak = 0.5 * (lo + hi);
    if balance(s_peak) < 0.0 {
        return Err(Error::NoSolution(format!(
            "load {t_m} N*m exceeds breakdown torque {:.3} N*m",
            ckt.solve(s_peak).1
        )));
    }

    let (mut a, mut b) = (0.0, s_peak);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if balance(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    Ok(point(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn table() -> MotorParams {
        MotorParams::default()
    }

    #[test]
    fn determinant_of_case_machine() {
        let p = table();
        assert_abs_diff_eq!(p.l_s(), 0.209674, epsilon = 1e-12);
        assert_abs_diff_eq!(p.det(), 0.209674f64.powi(2) - 0.2037f64.powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(p.det(), 2.4695e-3, epsilon = 1e-6);
    }

    #[test]
    fn degenerate_parameters_rejected() {
        let mut p = table();
        p.l_ls = 0.0;
        p.l_lr = 0.0;
        assert!(matches!(
            currents_from_fluxes(&p, &ElectricalState::new(1.0, 0.0, 0.0, 0.0)),
            Err(Error::DegenerateParameters(_))
        ));
        assert!(p.validate().is_err());
        let mut p = table();
        p.pole_pairs = 0;
        assert!(p.validate().is_err());
        let mut p = table();
        p.friction = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn decoupled_axes_without_mutual() {
        let mut p = table();
        p.l_m = 0.0;
        let i = currents_from_fluxes(&p, &ElectricalState::new(0.3, -0.2, 0.7, 0.1)).unwrap();
        assert_relative_eq!(i.iqs, 0.3 / p.l_s(), max_relative = 1e-12);
        assert_relative_eq!(i.iqr, 0.7 / p.l_r(), max_relative = 1e-12);
    }

    #[test]
    fn unit_current_injection() {
        let p = table();
        let es = fluxes_from_currents(&p, &DqCurrents { iqs: 1.0, ..Default::default() });
        assert_eq!(es, ElectricalState::new(p.l_s(), 0.0, p.l_m, 0.0));
        assert_eq!(fluxes_from_currents(&p, &DqCurrents::default()), ElectricalState::default());
    }

    #[test]
    fn torque_vanishes_on_aligned_fluxes_and_scales_quadratically() {
        let p = table();
        let es = ElectricalState::new(0.8, 0.8, 0.5, 0.5);
        assert_abs_diff_eq!(electrical_torque(&p, &es).unwrap(), 0.0, epsilon = 1e-12);
        let es = ElectricalState::new(0.9, -0.1, 0.85, -0.2);
        let t1 = electrical_torque(&p, &es).unwrap();
        let es2 = ElectricalState::new(1.8, -0.2, 1.7, -0.4);
        assert_relative_eq!(electrical_torque(&p, &es2).unwrap(), 4.0 * t1, max_relative = 1e-12);
    }

    #[test]
    fn zero_state_has_zero_derivative() {
        let p = table();
        let d = state_derivative(&p, &ElectricalState::default(), &MechanicalState::default(), 0.0, 0.0, 377.0, 0.0)
            .unwrap();
        assert_eq!(d, StateDerivative::default());
    }

    #[test]
    fn synchronism_without_rotor_current_freezes_rotor_flux() {
        let p = table();
        let w = 2.0 * PI * 60.0;
        // Rotor current zero means λ_r = L_m·i_s and λ_s = L_s·i_s.
        let c = DqCurrents { iqs: 2.0, ids: -1.0, iqr: 0.0, idr: 0.0 };
        let es = fluxes_from_currents(&p, &c);
        let ms = MechanicalState { omega_m: w / p.p() };
        let d = state_derivative(&p, &es, &ms, 100.0, 20.0, w, 0.0).unwrap();
        assert_abs_diff_eq!(d.lqr, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.ldr, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn oracle_no_load_limit() {
        let mut p = table();
        p.friction = 0.0;
        let ss = steady_state_oracle(&p, 460.0, 60.0, 0.0).unwrap();
        assert_eq!(ss.slip, 0.0);
        let v_ph = 460.0 / 3f64.sqrt();
        let w = 2.0 * PI * 60.0;
        let z = Complex64::new(p.r_s, w * (p.l_ls + p.l_m)).norm();
        assert_relative_eq!(ss.i_stator_rms, v_ph / z, max_relative = 1e-12);
        assert_relative_eq!(ss.omega_m, w / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn oracle_rated_load_has_small_unique_slip() {
        let p = table();
        let ss = steady_state_oracle(&p, 460.0, 60.0, 50.0).unwrap();
        assert!(ss.slip > 0.0 && ss.slip < 0.1, "slip {}", ss.slip);
        let required = 50.0 + p.friction * ss.omega_m;
        assert_relative_eq!(ss.t_e, required, max_relative = 1e-9);
        // only one crossing below the breakdown slip
        let mut crossings = 0;
        let mut prev = equivalent_circuit_torque(&p, 460.0, 60.0, 0.0, 1e-6) - required;
        for k in 2..=1000 {
            let s = k as f64 * 1e-4;
            let cur = equivalent_circuit_torque(&p, 460.0, 60.0, 0.0, s) - 50.0 - p.friction * (1.0 - s) * 188.5;
            if prev.signum() != cur.signum() {
                crossings += 1;
            }
            prev = cur;
        }
        assert_eq!(crossings, 1);
    }

    #[test]
    fn torque_rises_up_to_breakdown() {
        let p = table();
        let mut prev = 0.0;
        let mut s_peak = 0.0;
        for k in 1..1000 {
            let s = k as f64 * 1e-3;
            let t = equivalent_circuit_torque(&p, 460.0, 60.0, 0.0, s);
            if t < prev {
                s_peak = s;
                break;
            }
            prev = t;
        }
        assert!(s_peak > 0.1 && s_peak < 0.5, "breakdown slip {s_peak}");
        let mut prev = 0.0;
        for k in 1..(((s_peak - 2e-3) / 1e-4) as usize) {
            let t = equivalent_circuit_torque(&p, 460.0, 60.0, 0.0, k as f64 * 1e-4);
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn oracle_rejects_stall_load() {
        assert!(matches!(steady_state_oracle(&table(), 460.0, 60.0, 500.0), Err(Error::NoSolution(_))));
    }

    #[test]
    fn oracle_operating_point_is_a_fixed_point_of_the_dynamics() {
        let p = table();
        let w = 2.0 * PI * 60.0;
        let ss = steady_state_oracle(&p, 460.0, 60.0, 50.0).unwrap();
        // Rebuild the dq steady state from the phasor solution: V = (V_pk, 0).
        let v = crate::frame::peak_phase_voltage(460.0);
        let s = ss.slip;
        let jw = Complex64::new(0.0, w);
        // dq phasor form: I_s and I_r with λ = L i, stator eq V = (R_s + jωL_s) I_s + jωL_m I_r
        // rotor eq 0 = (R_r + j s ω L_r) I_r + j s ω L_m I_s
        let a11 = p.r_s + jw * p.l_s();
        let a12 = jw * p.l_m;
        let a21 = jw * s * p.l_m;
        let a22 = p.r_r + jw * s * p.l_r();
        let det = a11 * a22 - a12 * a21;
        let i_s = v * a22 / det;
        let i_r = -v * a21 / det;
        // In this frame a phasor X maps to q = Re X, d = -Im X.
        let c = DqCurrents { iqs: i_s.re, ids: -i_s.im, iqr: i_r.re, idr: -i_r.im };
        let es = fluxes_from_currents(&p, &c);
        let ms = MechanicalState { omega_m: ss.omega_m };
        let d = state_derivative(&p, &es, &ms, v, 0.0, w, 50.0).unwrap();
        let flux_scale = v / w;
        for x in [d.lqs, d.lds, d.lqr, d.ldr] {
            assert!(x.abs() / (w * flux_scale) < 1e-6, "flux derivative {x}");
        }
        assert!(d.omega_m.abs() * p.inertia / 50.0 < 1e-6, "speed derivative {}", d.omega_m);
        assert_relative_eq!((i_s.norm_sqr() / 2.0).sqrt(), ss.i_stator_rms, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn flux_current_maps_are_inverse(
            a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64) {
            let p = table();
            let es = ElectricalState::new(a, b, c, d);
            let back = fluxes_from_currents(&p, &currents_from_fluxes(&p, &es).unwrap());
            let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs()).max(1e-12);
            for (x, y) in [(back.lqs, a), (back.lds, b), (back.lqr, c), (back.ldr, d)] {
                prop_assert!((x - y).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn torque_forms_agree(
            a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64) {
            let p = table();
            let es = ElectricalState::new(a, b, c, d);
            let i = currents_from_fluxes(&p, &es).unwrap();
            let t1 = electrical_torque(&p, &es).unwrap();
            let t2 = electrical_torque_from_currents(&p, &es, &i);
            prop_assert!((t1 - t2).abs() <= 1e-10 * t1.abs().max(1.0));
        }

        #[test]
        fn derivative_is_affine_in_stator_voltage(
            vq in -400.0..400.0f64, vd in -400.0..400.0f64, k in -3.0..3.0f64) {
            let p = table();
            let es = ElectricalState::new(0.9, -0.2, 0.85, -0.25);
            let ms = MechanicalState { omega_m: 180.0 };
            let w = 377.0;
            let f = |q: f64, d: f64| state_derivative(&p, &es, &ms, q, d, w, 10.0).unwrap();
            let d0 = f(0.0, 0.0);
            let d1 = f(vq, vd);
            let dk = f(k * vq, k * vd);
            prop_assert!(((dk.lqs - d0.lqs) - k * (d1.lqs - d0.lqs)).abs() < 1e-9);
            prop_assert!(((dk.lds - d0.lds) - k * (d1.lds - d0.lds)).abs() < 1e-9);
            prop_assert_eq!(dk.lqr, d0.lqr);
            prop_assert_eq!(dk.omega_m, d0.omega_m);
        }
    }
}
