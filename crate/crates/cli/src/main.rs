use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use vq_core::control::AltitudeDesign;
use vq_core::estimation::design_kalman_gain;
use vq_core::sim::{run, Scenario, StopReason};

mod config;
mod output;
mod report;
mod svg;

use config::RunConfig;

/// Quadrotor control design and simulation.
#[derive(Debug, Parser)]
#[command(name = "vq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write log.csv, plot scripts and manifest.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the configured seed.
        #[arg(long, env = "VQ_SEED")]
        seed: Option<u64>,
        /// Also render SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Print controller and estimator gains.
    Design {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tracking lag of a first-order follower behind a ramping reference.
    AnalyzeLag {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        v_final: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_total: f64,
        /// Number of reference steps; a convergence ladder when absent.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("simulation error: {0}")]
    Simulation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<vq_core::Error> for CliError {
    fn from(e: vq_core::Error) -> Self {
        match e {
            vq_core::Error::Simulation { .. } => CliError::Simulation(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn simulate(config_path: &Path, out: &Path, seed: Option<u64>, with_svg: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = RunConfig::load(config_path)?;
    let sim = cfg.to_sim_config(seed)?;
    let mut resolved = cfg.clone();
    resolved.simulation.seed = sim.seed;
    let log = run(&sim)?;
    for w in &log.warnings {
        eprintln!("warning: {w}");
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    output::write_csv(&out.join(output::LOG_FILE), &log)?;
    let mut files = vec![output::LOG_FILE.to_string()];
    files.extend(output::write_plots(out, &log, with_svg)?);
    files.push(output::MANIFEST_FILE.to_string());
    let manifest = output::RunManifest {
        config_path: config_path.to_path_buf(),
        config_hash: output::config_hash(&resolved.canonical_json()),
        seed: sim.seed,
        scenario: match sim.scenario {
            Scenario::Nominal => "nominal".into(),
            Scenario::VolcanoHover => "volcano-hover".into(),
        },
        output_dir: out.to_path_buf(),
        files,
        end_time_s: log.end_time(),
        stop_reason: match log.stop_reason {
            StopReason::Arrived => "arrived".into(),
            StopReason::MaxTime => "max-time".into(),
        },
        warnings: log.warnings.clone(),
        wall_clock_s: started.elapsed().as_secs_f64(),
    };
    output::write_manifest(out, &manifest)?;
    println!("wrote {} rows to {}", log.rows.len(), out.join(output::LOG_FILE).display());
    Ok(())
}

fn design(config_path: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(config_path)?;
    let params = cfg.params()?;
    let h = match cfg.controller.target_height {
        Some(h) => h,
        None => match cfg.scenario() {
            Scenario::VolcanoHover => cfg.mission.hover_height,
            Scenario::Nominal => match cfg.mission.waypoints.as_deref() {
                Some([.., last]) => last[2],
                _ => return Err(CliError::Config("missing field `mission.waypoints`".into())),
            },
        },
    };
    let altitude = AltitudeDesign::new(&params, cfg.controller.poles, h)?;
    let noise = cfg.noise_model(&params)?;
    let kalman = design_kalman_gain(&noise, params.mass(), params.gravity())?;
    print!("{}", report::design_report(&params, &altitude, &noise, &kalman));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, out, seed, svg } => simulate(config, out, *seed, *svg),
        Command::Design { config } => design(config),
        Command::AnalyzeLag { lambda, v_final, t_total, n } => {
            report::lag_report(*lambda, *v_final, *t_total, *n).map(|text| print!("{text}"))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
