use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use efdvd::checks::property_suite;
use efdvd::runner::{parse_settings, run_single, run_sweep, write_csv, write_plot_data, RunConfig, RunReport, Settings};
use efdvd::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "efdvd", version, about = "Conservative integrators for the cubic NLS breather benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate once at the configured dt (or sweep with --sweep).
    Run {
        #[command(flatten)]
        opts: RunOpts,
        /// Run the whole sweep instead of a single dt.
        #[arg(long)]
        sweep: bool,
    },
    /// Convergence sweep over dt / 2^k, k = 0..=sweep-k.
    Sweep {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the algebraic-identity property suite.
    Check {
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// dvd, ef-dvd, avf or ef-avf.
    #[arg(long)]
    scheme: Option<String>,
    /// Breather frequency, also used as the fitting frequency.
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    dx: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "T", id = "t_final")]
    t_final: Option<String>,
    #[arg(long)]
    sweep_k: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long, env = "EFDVD_OUTPUT_DIR")]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Accepted for symmetry with `check`; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Fill the wall_seconds column. Off by default so CSVs are reproducible.
    #[arg(long)]
    timing: bool,
}

impl RunOpts {
    fn settings(&self) -> Result<Settings, Error> {
        let mut s = match &self.config {
            Some(path) => parse_settings(
                &fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            )?,
            None => Settings::new(),
        };
        let mut set = |key: &str, value: &Option<String>| {
            if let Some(v) = value {
                s.insert(key.to_string(), v.clone());
            }
        };
        set("preset", &self.preset);
        set("scheme.variant", &self.scheme);
        set("breather.omega", &self.omega);
        set("scheme.omega", &self.omega);
        set("breather.beta", &self.beta);
        set("grid.dx", &self.dx);
        set("grid.dt", &self.dt);
        set("grid.t_final", &self.t_final);
        set("sweep.max_k", &self.sweep_k);
        set("solver.tol", &self.tol);
        set("solver.max_iters", &self.max_iters);
        if self.dx.is_some() {
            s.remove("grid.dx_numerator");
            s.remove("grid.dx_denominator");
        }
        if self.sweep_k.is_some() {
            s.remove("sweep.dts");
        }
        if let Some(dir) = &self.output {
            s.insert("output.dir".into(), dir.display().to_string());
        }
        Ok(s)
    }
}

fn write_outputs(report: &RunReport, dir: &Path, timing: bool) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let name = report.scheme.variant.as_str();
    write_csv(report, BufWriter::new(File::create(dir.join(format!("{name}.csv")))?), timing)?;
    write_plot_data(report, BufWriter::new(File::create(dir.join(format!("{name}.dat")))?))?;
    Ok(())
}

fn execute(opts: &RunOpts, sweep: bool) -> ExitCode {
    let config = match opts.settings().and_then(|s| RunConfig::from_settings(&s)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = if sweep { run_sweep(&config, opts.jobs) } else { run_single(&config) };
    let report = match result {
        Ok(r) => r,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    print!("{report}");
    if let Err(e) = write_outputs(&report, &config.output_path, opts.timing) {
        eprintln!("error: writing {}: {e}", config.output_path.display());
        return ExitCode::FAILURE;
    }
    if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SOLVER)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { opts, sweep } => execute(&opts, sweep),
        Command::Sweep { opts } => execute(&opts, true),
        Command::Check { seed } => match property_suite(seed) {
            Ok(outcomes) => {
                for o in &outcomes {
                    println!("{o}");
                }
                if outcomes.iter().all(|o| o.passed()) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_CHECK)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CHECK)
            }
        },
    }
}
