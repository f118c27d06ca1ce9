use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracsep_cli::{output_dir, parse_config, Command, Run, OUT_ENV};

#[derive(Parser)]
#[command(name = "fracsep", version, about = "Long-jump exclusion with a slow barrier: simulation, limit equations, checks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Experiment config (flat TOML with dotted sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; defaults to $FRACSEP_OUT, then the config's output_dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Print the limit equation selected by (gamma, barrier).
    Classify,
    /// Write particle trajectories for every n.
    Simulate,
    /// Write lattice-ODE solutions of the limit equation for every n.
    Solve,
    /// Monte-Carlo ensembles against the limit equation.
    Compare,
    /// Exact small-system, energy and seminorm checks.
    Verify,
    /// Discrete-to-continuum operator errors.
    Opcheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Classify => Command::Classify,
        Sub::Simulate => Command::Simulate,
        Sub::Solve => Command::Solve,
        Sub::Compare => Command::Compare,
        Sub::Verify => Command::Verify,
        Sub::Opcheck => Command::Opcheck,
    };
    let Some(path) = cli.config else {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(2);
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let out = output_dir(cli.out.as_deref(), std::env::var(OUT_ENV).ok(), &config);
    let run = Run::new(&config, command, out);
    match run.execute() {
        Ok(summary) => {
            println!("{summary}");
            println!("{}", run.header());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
