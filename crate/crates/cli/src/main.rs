//! `naghdi` command line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use naghdi_core::harness::{run_study, RunConfig, StudyMode, StudyOutput};
use naghdi_core::Error;

#[derive(Parser, Debug)]
#[command(name = "naghdi", version, about = "Mixed DG shell solver and verification studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the configured case on the coarsest mesh for every epsilon.
    Run(Common),
    /// Refinement ladder with observed convergence rates.
    Converge(Common),
    /// Mixed method against the primal baseline across the epsilon ladder.
    Locking(Common),
    /// Refinement ladder with Korn and stability constants.
    Diagnostics(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run configuration; defaults are used for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the CSV and text reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Interior penalty constant.
    #[arg(long)]
    penalty: Option<f64>,
    /// Shear correction factor.
    #[arg(long)]
    kappa: Option<f64>,
    /// Polynomial degree of the rotation and displacement spaces.
    #[arg(long)]
    degree: Option<usize>,
}

/// Exit code when a study ran but an invariant probe failed.
const PROBE_FAILURE: u8 = 3;

fn configure(common: &Common, mode: StudyMode) -> Result<RunConfig, Error> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.mode = mode;
    if let Some(p) = common.penalty {
        config.penalty = Some(p);
    }
    if let Some(k) = common.kappa {
        config.moduli.kappa = k;
    }
    if let Some(d) = common.degree {
        config.degree = d;
    }
    config.validate()?;
    Ok(config)
}

fn execute(common: &Common, mode: StudyMode) -> Result<bool, Error> {
    let config = configure(common, mode)?;
    info!("case {} on {}, mode {:?}", config.case.as_str(), config.chart().name(), mode);
    let output = run_study(&config)?;
    for (name, report) in output.reports() {
        println!("# {name}");
        print!("{}", report.to_table());
        if let Some(dir) = &common.out {
            for path in report.write(dir, name)? {
                info!("wrote {}", path.display());
            }
        }
    }
    let mut ok = output.probes().iter().all(|p| p.passed);
    if let StudyOutput::Study(s) = &output {
        if mode == StudyMode::Diagnostics {
            // With a clamped or supported side the strain energy must control the H norm.
            let korn_ok = s.report.rows.iter().all(|r| r.korn_lambda_min.is_none_or(|k| k > 0.0));
            if !korn_ok {
                error!("Korn eigenvalue is not positive; rigid motions are not restrained");
            }
            ok &= korn_ok;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (common, mode) = match &cli.command {
        Command::Run(c) => (c, StudyMode::Single),
        Command::Converge(c) => (c, StudyMode::Convergence),
        Command::Locking(c) => (c, StudyMode::Locking),
        Command::Diagnostics(c) => (c, StudyMode::Diagnostics),
    };
    match execute(common, mode) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(PROBE_FAILURE),
        Err(e @ Error::Coercivity(_)) => {
            error!("{e}");
            ExitCode::from(PROBE_FAILURE)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}
