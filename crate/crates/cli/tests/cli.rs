use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use motor_dse::config::RunConfig;
use motor_dse::report::DetectionReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_motor-dse"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&Path]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn simulate_writes_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let truth = dir.path().join("truth.csv");
    let out = bin().arg("simulate").arg(config("no_fault.cfg")).arg(&csv).arg("--truth").arg(&truth).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,va,vb,vc,ia,ib,ic,Tm,wm"));
    assert_eq!(lines.count(), 601);
    let truth = fs::read_to_string(&truth).unwrap();
    assert!(truth.starts_with("t,lqs,lds,lqr,ldr,Te,wm\n"));
    assert_eq!(truth.lines().count(), 602);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("601") && stdout.contains("slip"), "{stdout}");
}

#[test]
fn fault_record_matches_healthy_record_before_onset() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("none.csv");
    let b = dir.path().join("ag.csv");
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("simulate"), &config("no_fault.cfg"), &a])), 0);
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("simulate"), &config("ag_fault.cfg"), &b])), 0);
    let (a, b) = (fs::read_to_string(a).unwrap(), fs::read_to_string(b).unwrap());
    let rows = |s: &str| -> Vec<String> { s.lines().map(str::to_string).collect() };
    let (ra, rb) = (rows(&a), rows(&b));
    // Header plus samples at t = 0, 0.01, ..., 4.99.
    assert_eq!(ra[..501], rb[..501]);
    assert_ne!(ra[502], rb[502]);
}

#[test]
fn unknown_config_key_exits_1_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[sim]\nt_endd = 6.0\n").unwrap();
    let out = run(&[Path::new("simulate"), &cfg, &dir.path().join("m.csv")]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("t_endd"), "{}", stderr(&out));

    let missing = run(&[Path::new("run"), &dir.path().join("nope.cfg"), dir.path()]);
    assert_eq!(code(&missing), 1);
}

#[test]
fn bad_parameter_value_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[fault]\nkind = \"line_line\"\nphases = \"A\"\n").unwrap();
    let out = run(&[Path::new("simulate"), &cfg, &dir.path().join("m.csv")]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn estimate_flags_line_ground_fault() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let cfg = config("ag_fault.cfg");
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("simulate"), &cfg, &csv])), 0);
    let out_dir = dir.path().join("est");
    let out = run(&[Path::new("estimate"), &cfg, &csv, &out_dir]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let report = DetectionReport::from_toml(&fs::read_to_string(out_dir.join("report.toml")).unwrap()).unwrap();
    let fault = report.intervals.iter().find(|i| i.label == "fault").unwrap();
    assert_eq!(fault.verdict, "Fault");
    assert!(fault.fault_windows >= 1);
    let windows = fs::read_to_string(out_dir.join("windows.csv")).unwrap();
    assert!(windows.starts_with("t_start,t_end,iterations,converged,J,dof,p,verdict\n"));
    assert_eq!(windows.lines().count(), report.windows.len() + 1);
}

/// A healthy record replayed from steady operation (start-up rows dropped).
#[test]
fn estimate_exits_0_on_healthy_running_record() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let cfg = config("no_fault.cfg");
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("simulate"), &cfg, &csv])), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let trimmed: Vec<&str> = text.lines().take(1).chain(text.lines().skip(1 + 50)).collect();
    let steady = dir.path().join("steady.csv");
    fs::write(&steady, trimmed.join("\n") + "\n").unwrap();
    let out_dir = dir.path().join("est");
    let out = run(&[Path::new("-q"), Path::new("estimate"), &cfg, &steady, &out_dir]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = DetectionReport::from_toml(&fs::read_to_string(out_dir.join("report.toml")).unwrap()).unwrap();
    assert!(report.windows.iter().all(|w| w.verdict == "Healthy"));
}

#[test]
fn malformed_csv_exits_4_and_names_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    fs::write(&csv, "t,va,vb,vc,ia,ib,ic,Tm\n0,1,2,3,4,5,6,7\n").unwrap();
    let out = run(&[Path::new("estimate"), &config("no_fault.cfg"), &csv, dir.path()]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("'wm'"), "{}", stderr(&out));

    let out = run(&[Path::new("estimate"), &config("no_fault.cfg"), &dir.path().join("absent.csv"), dir.path()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn run_layout_is_stable_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = config("ab_fault.cfg");
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("run"), &cfg, &a])), 3);
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("run"), &cfg, &b])), 3);
    let mut names: Vec<String> =
        fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(
        names,
        ["measurements.csv", "plot_current.csv", "plot_voltage.csv", "report.toml", "truth.csv", "windows.csv"]
    );
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n} differs");
    }
    let plot = fs::read_to_string(a.join("plot_voltage.csv")).unwrap();
    let mut rows = plot.lines().skip(1);
    let first: f64 = rows.next().unwrap().split(',').next().unwrap().parse().unwrap();
    let last: f64 = plot.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first - 4.5).abs() < 1e-9 && (last - 5.75).abs() < 1e-9, "{first} {last}");
}

#[test]
fn report_config_echo_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = config("abcg_fault.cfg");
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("run"), &cfg_path, dir.path()])), 3);
    let report = DetectionReport::from_toml(&fs::read_to_string(dir.path().join("report.toml")).unwrap()).unwrap();
    let original = RunConfig::load(&cfg_path).unwrap();
    assert_eq!(report.config, original.resolved().unwrap());
    let echo = RunConfig::from_toml(&report.config.to_toml().unwrap()).unwrap();
    assert_eq!(echo.dse_config().unwrap(), original.dse_config().unwrap());
    assert_eq!(echo.scenario().resolved().unwrap(), original.scenario().resolved().unwrap());
}

#[test]
fn seed_override_changes_noise_only() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let cfg = config("no_fault.cfg");
    assert_eq!(code(&run(&[Path::new("-q"), Path::new("simulate"), &cfg, &a])), 0);
    let out = bin().args(["-q", "simulate"]).arg(&cfg).arg(&b).args(["--seed", "99"]).output().unwrap();
    assert_eq!(code(&out), 0);
    let (a, b) = (fs::read_to_string(a).unwrap(), fs::read_to_string(b).unwrap());
    assert_eq!(a.lines().count(), b.lines().count());
    assert_ne!(a, b);
}
