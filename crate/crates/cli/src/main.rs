use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use motor_dse::config::RunConfig;
use motor_dse::pipeline::{self, SimOutput};
use motor_dse::report::DetectionReport;
use motor_dse::sim::{read_measurement_csv, SimRecord};
use motor_dse::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_FAULT: u8 = 3;
const EXIT_CSV: u8 = 4;

#[derive(Parser)]
#[command(name = "motor-dse", version, about = "Induction motor terminal-fault simulation and detection")]
struct Cli {
    /// Suppress the summary printed on success.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Seeds {
    /// Override `sim.seed` (measurement noise).
    #[arg(long)]
    seed: Option<u64>,
    /// Override `dse.seed` (estimator initial state).
    #[arg(long)]
    dse_seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write the measurement CSV.
    Simulate {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Measurement CSV to write.
        output: PathBuf,
        /// Also write ground-truth states to this CSV.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        seeds: Seeds,
    },
    /// Run the estimator over a measurement CSV; exits 3 when a fault is detected.
    Estimate {
        /// Scenario file (TOML); supplies machine, source, and estimator settings.
        config: PathBuf,
        /// Measurement CSV with columns t,va,vb,vc,ia,ib,ic,Tm,wm.
        measurements: PathBuf,
        /// Directory for windows.csv and report.toml.
        output: PathBuf,
        #[command(flatten)]
        seeds: Seeds,
    },
    /// Simulate, estimate, and write all outputs into a directory.
    Run {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Output directory, created if missing.
        output: PathBuf,
        #[command(flatten)]
        seeds: Seeds,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Csv(_) => EXIT_CSV,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn load_config(path: &Path, seeds: &Seeds) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seeds.seed {
        cfg.sim.seed = s;
    }
    if let Some(s) = seeds.dse_seed {
        cfg.dse.seed = s;
    }
    Ok(cfg)
}

fn read_measurements(path: &Path) -> Result<SimRecord, Error> {
    let file = std::fs::File::open(path).map_err(|e| Error::Csv(format!("cannot open {}: {e}", path.display())))?;
    read_measurement_csv(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Csv(m) => Error::Csv(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn print_sim_summary(cfg: &RunConfig, out: &SimOutput) {
    let s = pipeline::sim_summary(cfg, out);
    println!("samples: {} at {} Hz ({} integration steps)", s.samples, cfg.sim.f_sample, s.fine_steps);
    match s.slip {
        Some(slip) => println!("steady-state slip before fault: {slip:.5}"),
        None => println!("steady-state slip before fault: n/a"),
    }
    println!("fault: {}", s.fault);
}

fn print_report(report: &DetectionReport) {
    let s = &report.summary;
    println!("windows: {} ({} errors, {} Fault, {} start)", s.windows, s.errors, s.fault_windows, s.start_mode);
    for iv in &report.intervals {
        println!(
            "{:<10} [{}, {}] s: {} windows, mean J {:.4}, max J {:.4}, max p {:.4} -> {}",
            iv.label, iv.t0, iv.t1, iv.windows, iv.mean_j, iv.max_j, iv.max_p, iv.verdict
        );
    }
    println!("verdict: {}", s.verdict);
}

fn detection_exit(report: &DetectionReport) -> u8 {
    if report.fault_detected() {
        EXIT_FAULT
    } else {
        0
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Simulate { config, output, truth, seeds } => {
            let cfg = load_config(config, seeds)?;
            let out = pipeline::simulate(&cfg)?;
            pipeline::write_simulation(&out, output, truth.as_deref())?;
            if !cli.quiet {
                print_sim_summary(&cfg, &out);
            }
            Ok(0)
        }
        Command::Estimate { config, measurements, output, seeds } => {
            let cfg = load_config(config, seeds)?;
            let rec = read_measurements(measurements)?;
            let report = pipeline::estimate(&cfg, &rec)?;
            pipeline::write_estimation(&report, output)?;
            if !cli.quiet {
                print_report(&report);
            }
            Ok(detection_exit(&report))
        }
        Command::Run { config, output, seeds } => {
            let cfg = load_config(config, seeds)?;
            let (out, report) = pipeline::run(&cfg, output)?;
            if !cli.quiet {
                print_sim_summary(&cfg, &out);
                print_report(&report);
                println!("outputs written to {}", output.display());
            }
            Ok(detection_exit(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
