use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kerr_blockade::run::{self, RunConfig, RunOptions, SweepArgs};

#[derive(Parser)]
#[command(version, about = "Pulsed photon-blockade simulation and optimization")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Optimizer seed (overrides `pso.seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also render SVG line plots.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve from vacuum and report the periodic-window minima.
    Simulate,
    /// Minimize g2min over the configured pulse family with a particle swarm.
    Optimize,
    /// Scan g2min along one named parameter.
    Sweep {
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        max: Option<f64>,
        #[arg(long, default_value_t = kerr_blockade::fitness::DEFAULT_SWEEP_POINTS)]
        points: usize,
    },
    /// Compare master-equation populations with the weak-excitation solution.
    AnalyticCompare,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> kerr_blockade::Result<()> {
    let path = cli
        .global
        .config
        .ok_or_else(|| kerr_blockade::Error::Config("--config <path> is required".into()))?;
    let cfg = RunConfig::load(&path)?;
    let opts = RunOptions {
        out_dir: cli.global.out,
        seed: cli.global.seed,
        svg: cli.global.svg,
    };
    match cli.command {
        Command::Simulate => {
            let s = run::cmd_simulate(&cfg, &opts)?;
            println!("{}", serde_json::to_string(&s)?);
        }
        Command::Optimize => {
            let r = run::cmd_optimize(&cfg, &opts)?;
            println!(
                "{}",
                serde_json::json!({"best_params": r.best_params, "best_fitness": r.best_fitness})
            );
        }
        Command::Sweep { param, min, max, points } => {
            let curve = run::cmd_sweep(&cfg, &opts, &SweepArgs { param, min, max, points })?;
            println!("{} points", curve.len());
        }
        Command::AnalyticCompare => {
            let r = run::cmd_analytic_compare(&cfg, &opts)?;
            println!("{}", serde_json::to_string(&r)?);
        }
    }
    Ok(())
}
