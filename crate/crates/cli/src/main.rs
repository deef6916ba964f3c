//! `killing-graph`: command-line driver for the Killing-graph solver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use killing_graph_cli::config::Config;
use killing_graph_cli::{run, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "killing-graph",
    version,
    about = "Prescribed mean curvature Killing graphs: solver, radial families, growth rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's "out", else the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to KG_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a Dirichlet problem; writes solution.csv and report.json.
    Solve(Common),
    /// Integrate rotational profiles u_c; writes radial.csv and report.json.
    Radial(Common),
    /// Evaluate the growth-rate function g(r); writes growth.csv and report.json.
    Growth(Common),
    /// Run a named experiment.
    Experiment {
        /// One of: nil-strip, removable-singularity, collin-krust-fit, sol3-wedge, e1tau-growth, iterated-log.
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

fn threads(arg: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match arg {
        Some(n) => Some(n),
        None => match std::env::var("KG_THREADS") {
            Ok(s) if !s.trim().is_empty() => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Config(format!("KG_THREADS={s:?} is not a thread count")))?,
            ),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Config("thread count must be positive".into()));
    }
    Ok(n)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (common, name) = match &cli.command {
        Command::Solve(c) | Command::Radial(c) | Command::Growth(c) => (c, None),
        Command::Experiment { name, common } => (common, Some(name.as_str())),
    };
    if let Some(name) = name {
        if !run::EXPERIMENTS.contains(&name) {
            return Err(CliError::Config(format!(
                "unknown experiment {name:?}; expected one of {}",
                run::EXPERIMENTS.join(", ")
            )));
        }
    }
    if let Some(n) = threads(common.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let cfg = Config::from_json(&text)?;
    let result = match &cli.command {
        Command::Solve(_) => run::solve(&cfg)?,
        Command::Radial(_) => run::radial(&cfg)?,
        Command::Growth(_) => run::growth(&cfg)?,
        Command::Experiment { name, .. } => run::experiment(name, &cfg)?,
    };
    let dir = common
        .out
        .clone()
        .or(cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    for path in result.outputs.commit(&dir)? {
        eprintln!("wrote {}", path.display());
    }
    if result.converged {
        println!("{}", result.summary);
        Ok(())
    } else {
        Err(CliError::NonConvergence(result.summary))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("killing-graph: {e}");
            match e {
                CliError::NonConvergence(_) => ExitCode::from(2),
                CliError::Config(_) | CliError::Io(_) => ExitCode::from(1),
            }
        }
    }
}
