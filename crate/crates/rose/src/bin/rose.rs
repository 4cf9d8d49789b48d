//! Command-line front end for the simulator library.
//!
//! Exit codes: 0 success, 1 physics/regression failure, 2 usage or parse
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rose_sim::harness::{
    self, parse_quantity, parse_sequence, GridOverrides, ScenarioReport,
};
use rose_sim::propagation;
use rose_sim::Error;

#[derive(Parser)]
#[command(
    name = "rose",
    about = "Photon-echo quantum memory simulator: silenced primary echoes, \
             revived secondary echoes, chirped rephasing pulses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory for CSV traces and summaries.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the time step (unit suffixes allowed, e.g. 5ns).
    #[arg(long, global = true)]
    dt: Option<String>,

    /// Override the detuning sample count.
    #[arg(long, global = true)]
    ndet: Option<usize>,

    /// Override the spatial slice count.
    #[arg(long, global = true)]
    nz: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sequence file.
    Run { file: PathBuf },
    /// Run a named scenario from the registry.
    Scenario { name: String },
    /// Run a parameter sweep file.
    Sweep { file: PathBuf },
    /// List registered scenarios.
    List,
    /// Calibrate the field coupling for the medium/grid of a sequence file.
    Calibrate { file: PathBuf },
}

fn overrides(cli: &Cli) -> Result<GridOverrides, Error> {
    let dt = match &cli.dt {
        None => None,
        Some(raw) => Some(parse_quantity(raw).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("cannot parse --dt {raw}"),
        })?),
    };
    Ok(GridOverrides {
        dt,
        n_det: cli.ndet,
        n_z: cli.nz,
    })
}

fn print_report(report: &ScenarioReport) {
    println!("scenario {}", report.name);
    for (key, value) in &report.summary {
        println!("  {key} = {value:.6e}");
    }
    for r in &report.regressions {
        println!(
            "  [{}] {}: measured {:.6e}, expected {}",
            if r.pass { "pass" } else { "FAIL" },
            r.metric,
            r.measured,
            r.expected
        );
    }
    for path in &report.artifacts {
        println!("  wrote {}", path.display());
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let ov = overrides(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Run { file } => {
            let text = std::fs::read_to_string(file)?;
            let spec = parse_sequence(&text)?;
            let report = harness::run_scenario_spec(&spec, ov, out)?;
            print_report(&report);
            Ok(report.all_passed())
        }
        Command::Scenario { name } => {
            let report = harness::run_scenario(name, ov, out)?;
            print_report(&report);
            Ok(report.all_passed())
        }
        Command::Sweep { file } => {
            let text = std::fs::read_to_string(file)?;
            let sweep = harness::parse_sweep(&text)?;
            let rows = harness::run_sweep(&sweep, ov, out)?;
            println!("parameter,measured,analytic");
            let mut ok = true;
            for r in &rows {
                println!("{},{},{}", r.value, r.measured, r.analytic);
                ok &= r.measured.is_finite();
            }
            Ok(ok)
        }
        Command::List => {
            for (name, description) in harness::list_scenarios() {
                println!("{name:20} {description}");
            }
            Ok(true)
        }
        Command::Calibrate { file } => {
            let text = std::fs::read_to_string(file)?;
            let spec = parse_sequence(&text)?;
            let coupling = propagation::calibrate_coupling(&spec.medium, &spec.grid)?;
            let transmission = propagation::weak_probe_transmission(
                &spec.medium,
                &spec.grid,
                coupling,
                propagation::InitialState::Ground,
            )?;
            println!("coupling = {coupling:.9e} rad/s per unit polarization per meter");
            println!(
                "weak-probe transmission = {transmission:.6} (target e^-alphaL = {:.6})",
                (-spec.medium.alpha_l).exp()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("regression checks failed");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Parse { .. } | Error::UnknownScenario(_) | Error::UnknownParameter(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
