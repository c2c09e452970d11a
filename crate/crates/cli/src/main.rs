use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pmm_cli::{cmd_bench, cmd_plan, cmd_validate, BenchMode, CliError};

/// Minimum-time point-mass trajectory planner.
#[derive(Parser)]
#[command(name = "pmm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan through a waypoint file and write <prefix>.traj, .csv and .summary.
    Plan {
        #[arg(short, long)]
        waypoints: PathBuf,
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Sampling step of the CSV series, s.
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Replay a trajectory file and check gaps, thrust and speed.
    Validate {
        #[arg(short, long)]
        trajectory: PathBuf,
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run the ablation configurations over seeded random instances.
    Bench {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short = 'n', long)]
        count: usize,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value = "single")]
        mode: BenchMode,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Plan { waypoints, config, out, dt } => {
            let summary = cmd_plan(&waypoints, &config, &out, dt)?;
            print!("{}", summary.render());
        }
        Command::Validate { trajectory, config } => {
            cmd_validate(&trajectory, &config)?;
        }
        Command::Bench { config, count, out, mode } => {
            cmd_bench(&config, count, &out, mode)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pmm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
