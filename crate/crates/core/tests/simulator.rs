use motor_dse::motor::steady_state_oracle_with_source;
use motor_dse::sim::{
    run_scenario, simulate_clean, to_dq_series, FaultKind, FaultSpec, Scenario, SimRecord, SimSample,
};
use std::sync::OnceLock;

fn healthy() -> &'static SimRecord {
    static REC: OnceLock<SimRecord> = OnceLock::new();
    REC.get_or_init(|| simulate_clean(&Scenario::default()).unwrap())
}

fn span(rec: &SimRecord, t0: f64, t1: f64) -> Vec<&SimSample> {
    rec.samples.iter().filter(|s| s.t >= t0 - 1e-9 && s.t < t1 - 1e-9).collect()
}

fn rms(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut acc, mut n) = (0.0, 0usize);
    for x in xs {
        acc += x * x;
        n += 1;
    }
    (acc / n as f64).sqrt()
}

#[test]
fn loaded_steady_state_matches_the_equivalent_circuit() {
    let sc = Scenario::default();
    let s = span(healthy(), 4.5, 5.0);
    let omega = s.iter().map(|s| s.omega_m).sum::<f64>() / s.len() as f64;
    let i_rms = rms(s.iter().flat_map(|s| s.i));
    let ss =
        steady_state_oracle_with_source(&sc.motor, sc.source.v_ll, sc.source.f, sc.load.t_m, sc.source.r_src).unwrap();
    assert!((omega - ss.omega_m).abs() / ss.omega_m < 0.01, "{omega} vs {}", ss.omega_m);
    assert!((i_rms - ss.i_stator_rms).abs() / ss.i_stator_rms < 0.02, "{i_rms} vs {}", ss.i_stator_rms);
}

#[test]
fn no_load_slip_is_small() {
    let sc = Scenario::default();
    let s = span(healthy(), 2.5, 3.0);
    let omega = s.iter().map(|s| s.omega_m).sum::<f64>() / s.len() as f64;
    let slip = 1.0 - omega / sc.motor.synchronous_mech_speed();
    assert!(slip > 0.0 && slip < 0.005, "slip {slip}");
}

#[test]
fn input_power_exceeds_shaft_power() {
    let s = span(healthy(), 5.0, 6.0);
    let n = s.len() as f64;
    let p_in = s.iter().map(|s| (0..3).map(|k| s.v[k] * s.i[k]).sum::<f64>()).sum::<f64>() / n;
    let p_mech = s.iter().map(|s| s.truth.t_e * s.omega_m).sum::<f64>() / n;
    assert!(p_mech > 8000.0 && p_in > p_mech, "in {p_in} W, shaft {p_mech} W");
}

#[test]
fn line_ground_fault_sags_voltage_and_raises_current() {
    let sc = Scenario { fault: FaultSpec::new(FaultKind::LineGround, "A"), ..Scenario::default() };
    let rec = simulate_clean(&sc).unwrap();
    let cycle = 1.0 / sc.source.f;
    let before = span(&rec, 5.0 - cycle, 5.0);
    // A full cycle after onset, clear of the switching transient.
    let during = span(&rec, 5.1, 5.1 + cycle);
    let va = |s: &[&SimSample]| rms(s.iter().map(|s| s.v[0]));
    let ia = |s: &[&SimSample]| rms(s.iter().map(|s| s.i[0]));
    assert!(va(&during) < va(&before), "{} !< {}", va(&during), va(&before));
    assert!(ia(&during) > ia(&before), "{} !> {}", ia(&during), ia(&before));
}

fn noise_free() -> Scenario {
    let mut sc = Scenario::default();
    sc.sim.sigma_v = Some(0.0);
    sc.sim.sigma_i = Some(0.0);
    sc
}

#[test]
fn noise_free_record_is_periodic_in_steady_state() {
    let sc = noise_free();
    let rec = run_scenario(&sc).unwrap();
    assert_eq!(rec.len(), 601);
    // 0.05 s is three cycles and five samples.
    let late: Vec<&SimSample> = rec.samples.iter().filter(|s| s.t >= 4.5 && s.t <= 5.0).collect();
    for w in late.windows(6) {
        let (a, b) = (w[0], w[5]);
        for k in 0..3 {
            assert!((a.v[k] - b.v[k]).abs() < 1e-3, "v at {}: {} vs {}", a.t, a.v[k], b.v[k]);
            assert!((a.i[k] - b.i[k]).abs() < 1e-4, "i at {}: {} vs {}", a.t, a.i[k], b.i[k]);
        }
    }
}

#[test]
fn steady_dq_ripple_is_below_the_noise_floor() {
    let sc = noise_free();
    let rec = run_scenario(&sc).unwrap();
    let dq = to_dq_series(&rec, &sc.source.frame());
    let idx: Vec<usize> = (0..dq.len()).filter(|&k| dq.t[k] >= 4.5 && dq.t[k] < 5.0).collect();
    let ripple = |v: &[f64]| {
        let (lo, hi) = idx.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &k| (lo.min(v[k]), hi.max(v[k])));
        hi - lo
    };
    let (sv, si) = (Scenario::default().sigma_v(), Scenario::default().sigma_i().unwrap());
    assert!(ripple(&dq.vq) < sv && ripple(&dq.vd) < sv);
    assert!(ripple(&dq.iq) < si && ripple(&dq.id) < si);
}

#[test]
fn identical_scenarios_give_identical_records() {
    let sc = Scenario { fault: FaultSpec::new(FaultKind::LineLine, "BC"), ..Scenario::default() };
    let a = run_scenario(&sc).unwrap();
    let b = run_scenario(&sc).unwrap();
    let bits = |r: &SimRecord| -> Vec<u64> {
        r.samples.iter().flat_map(|s| s.v.into_iter().chain(s.i).chain([s.omega_m, s.t_m])).map(f64::to_bits).collect()
    };
    assert_eq!(bits(&a), bits(&b));
    let other = run_scenario(&Scenario { sim: motor_dse::sim::SimConfig { seed: 2, ..sc.sim }, ..sc.clone() }).unwrap();
    assert_ne!(bits(&a), bits(&other));
}
