//! Three-phase to synchronous qd0 frame conversion.
//!
//! The forward map is the amplitude-invariant (2/3-scaled) transform with the
//! q axis on the cosine row and the d axis on the sine row:
//!
//! ```text
//! [q]         [ cos θ   cos(θ-α)   cos(θ+α) ] [a]
//! [d] = 2/3 · [ sin θ   sin(θ-α)   sin(θ+α) ] [b]      α = 2π/3
//! [0]         [  1/2      1/2        1/2    ] [c]
//! ```
//!
//! A balanced positive-sequence cosine of peak `A` with phase A at angle θ maps
//! to the constant vector `(A, 0, 0)`.

use std::f64::consts::{PI, SQRT_2};

/// Phase displacement between adjacent phases.
pub const ALPHA: f64 = 2.0 * PI / 3.0;

/// Instantaneous three-phase quantity (volts or amperes) at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreePhaseSample {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ThreePhaseSample {
    pub fn new(t: f64, a: f64, b: f64, c: f64) -> Self {
        Self { t, a, b, c }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

/// q, d and zero-sequence components at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DqzSample {
    pub t: f64,
    pub q: f64,
    pub d: f64,
    pub z: f64,
}

impl DqzSample {
    pub fn new(t: f64, q: f64, d: f64, z: f64) -> Self {
        Self { t, q, d, z }
    }
}

/// Synchronous frame angle `θ(t) = ω·t + θ0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAngle {
    pub theta0: f64,
    /// Electrical rad/s.
    pub omega: f64,
}

impl FrameAngle {
    pub fn new(theta0: f64, omega: f64) -> Self {
        Self { theta0, omega }
    }

    /// Frame rotating at `2π·f` with `θ0 = 0`.
    pub fn synchronous(f_hz: f64) -> Self {
        Self::new(0.0, 2.0 * PI * f_hz)
    }

    pub fn angle(&self, t: f64) -> f64 {
        self.omega * t + self.theta0
    }
}

#[inline]
fn basis(theta: f64) -> ([f64; 3], [f64; 3]) {
    let (s0, c0) = theta.sin_cos();
    let (s1, c1) = (theta - ALPHA).sin_cos();
    let (s2, c2) = (theta + ALPHA).sin_cos();
    ([c0, c1, c2], [s0, s1, s2])
}

/// Forward transform of three raw phase values at angle `theta`.
#[inline]
pub fn park(theta: f64, abc: [f64; 3]) -> [f64; 3] {
    let (c, s) = basis(theta);
    let q = 2.0 / 3.0 * (c[0] * abc[0] + c[1] * abc[1] + c[2] * abc[2]);
    let d = 2.0 / 3.0 * (s[0] * abc[0] + s[1] * abc[1] + s[2] * abc[2]);
    let z = (abc[0] + abc[1] + abc[2]) / 3.0;
    [q, d, z]
}

/// Inverse of [`park`].
#[inline]
pub fn inverse_park(theta: f64, qdz: [f64; 3]) -> [f64; 3] {
    let (c, s) = basis(theta);
    let [q, d, z] = qdz;
    [c[0] * q + s[0] * d + z, c[1] * q + s[1] * d + z, c[2] * q + s[2] * d + z]
}

pub fn abc_to_dq0(s: &ThreePhaseSample, fr: &FrameAngle) -> DqzSample {
    let [q, d, z] = park(fr.angle(s.t), s.as_array());
    DqzSample { t: s.t, q, d, z }
}

pub fn dq0_to_abc(s: &DqzSample, fr: &FrameAngle) -> ThreePhaseSample {
    let [a, b, c] = inverse_park(fr.angle(s.t), [s.q, s.d, s.z]);
    ThreePhaseSample { t: s.t, a, b, c }
}

/// Peak phase-to-neutral voltage for an rms line-to-line rating.
pub fn peak_phase_voltage(v_ll_rms: f64) -> f64 {
    v_ll_rms * SQRT_2 / 3f64.sqrt()
}

/// Ideal balanced positive-sequence supply; phase B lags A by α, C leads by α.
pub fn balanced_source(v_ll_rms: f64, fr: &FrameAngle, t: f64) -> ThreePhaseSample {
    let v_pk = peak_phase_voltage(v_ll_rms);
    let theta = fr.angle(t);
    ThreePhaseSample { t, a: v_pk * theta.cos(), b: v_pk * (theta - ALPHA).cos(), c: v_pk * (theta + ALPHA).cos() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_phase_a_at_zero_angle() {
        let fr = FrameAngle::new(0.0, 0.0);
        let s = abc_to_dq0(&ThreePhaseSample::new(0.0, 1.0, -0.5, -0.5), &fr);
        assert_abs_diff_eq!(s.q, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.d, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_and_common_mode_inputs() {
        let fr = FrameAngle::new(0.3, 377.0);
        for &t in &[0.0, 0.0123, 1.7] {
            let zero = abc_to_dq0(&ThreePhaseSample::new(t, 0.0, 0.0, 0.0), &fr);
            assert_eq!((zero.q, zero.d, zero.z), (0.0, 0.0, 0.0));
            let cm = abc_to_dq0(&ThreePhaseSample::new(t, 1.0, 1.0, 1.0), &fr);
            assert_abs_diff_eq!(cm.q, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(cm.d, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(cm.z, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn inverse_of_unit_q() {
        let fr = FrameAngle::new(0.0, 0.0);
        let abc = dq0_to_abc(&DqzSample::new(0.0, 1.0, 0.0, 0.0), &fr);
        assert_abs_diff_eq!(abc.a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(abc.b, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(abc.c, -0.5, epsilon = 1e-15);
        let zs = dq0_to_abc(&DqzSample::new(0.0, 0.0, 0.0, 1.0), &FrameAngle::new(1.1, 377.0));
        assert_abs_diff_eq!(zs.a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(zs.b, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(zs.c, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_source_peak_and_image() {
        assert_abs_diff_eq!(peak_phase_voltage(460.0), 375.59, epsilon = 0.01);
        let fr = FrameAngle::new(0.4, 2.0 * PI * 60.0);
        for k in 0..50 {
            let t = k as f64 * 0.00731;
            let dq = abc_to_dq0(&balanced_source(460.0, &fr, t), &fr);
            assert_abs_diff_eq!(dq.q, peak_phase_voltage(460.0), epsilon = 1e-9);
            assert_abs_diff_eq!(dq.d, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(dq.z, 0.0, epsilon = 1e-9);
        }
        let off = balanced_source(0.0, &fr, 0.5);
        assert_eq!((off.a, off.b, off.c), (0.0, 0.0, 0.0));
    }

    proptest! {
        #[test]
        fn round_trip(a in -1e3..1e3f64, b in -1e3..1e3f64, c in -1e3..1e3f64,
                      theta in -10.0..10.0f64) {
            let back = inverse_park(theta, park(theta, [a, b, c]));
            let scale = a.abs().max(b.abs()).max(c.abs()).max(1e-300);
            for (x, y) in back.iter().zip([a, b, c]) {
                prop_assert!((x - y).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn zero_sequence_is_mean(a in -1e3..1e3f64, b in -1e3..1e3f64, c in -1e3..1e3f64,
                                 theta in -10.0..10.0f64) {
            prop_assert_eq!(park(theta, [a, b, c])[2], (a + b + c) / 3.0);
        }

        #[test]
        fn linear(x in prop::array::uniform3(-10.0..10.0f64),
                  y in prop::array::uniform3(-10.0..10.0f64),
                  al in -3.0..3.0f64, be in -3.0..3.0f64, theta in -7.0..7.0f64) {
            let mix = [al * x[0] + be * y[0], al * x[1] + be * y[1], al * x[2] + be * y[2]];
            let lhs = park(theta, mix);
            let (tx, ty) = (park(theta, x), park(theta, y));
            for i in 0..3 {
                prop_assert!((lhs[i] - (al * tx[i] + be * ty[i])).abs() < 1e-11);
            }
        }

        #[test]
        fn amplitude_invariant(amp in 0.0..1e3f64, phi in -4.0..4.0f64, theta in -7.0..7.0f64) {
            let abc = [amp * (theta + phi).cos(),
                       amp * (theta + phi - ALPHA).cos(),
                       amp * (theta + phi + ALPHA).cos()];
            let [q, d, _] = park(theta, abc);
            prop_assert!(((q * q + d * d).sqrt() - amp).abs() < 1e-9);
        }
    }
}
