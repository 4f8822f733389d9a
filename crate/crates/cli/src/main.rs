use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsh_cli::commands;
use nsh_cli::config::{List, RawConfig, RunConfig, Scalar};
use nsh_cli::{CliError, Outcome};

#[derive(Parser)]
#[command(name = "nsh", version, about = "Ridge-Nehari stationary solutions of the Swift-Hohenberg equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Constant solutions, Sobolev constants and β thresholds.
    Constants,
    /// Classify the fibration of a field file.
    Fibration,
    /// Multistart ridge minimization.
    Solve,
    /// Ridge solves over a list of stretch factors.
    Sweep,
    /// Even-reflection extension of a box solution.
    Tile,
    /// Same-lattice and distinctness tests for exact transition matrices.
    Lattice,
    /// Re-check a field file against the inequality suite.
    Verify,
}

#[derive(Args)]
struct Flags {
    /// Flat key = value config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<String>,
    /// A number, or `F*beta0` / `F*2S2` relative to the measured thresholds.
    #[arg(long, global = true)]
    beta: Option<String>,
    /// `box:L1,L2[,L3]` or `torus:<matrix>` with generators as columns (`torus:hex`).
    #[arg(long, global = true)]
    domain: Option<String>,
    /// Stretch factor applied to the domain.
    #[arg(long = "R", global = true)]
    r: Option<String>,
    /// Bandwidth per axis.
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long, global = true)]
    starts: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    /// Comma-separated stretch factors.
    #[arg(long, global = true)]
    sweep: Option<String>,
    /// Comma-separated replication counts.
    #[arg(long, global = true)]
    counts: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    emit_pgm: bool,
    /// Input field file.
    #[arg(long, global = true)]
    field: Option<PathBuf>,
    /// Transition matrix, e.g. `[[3/2,0],[0,1]]`.
    #[arg(long, global = true)]
    matrix: Option<String>,
    /// Generators (as columns) of the first lattice.
    #[arg(long, global = true)]
    from: Option<String>,
    /// Generators (as columns) of the second lattice.
    #[arg(long, global = true)]
    to: Option<String>,
}

impl Flags {
    fn raw(&self) -> RawConfig {
        RawConfig {
            alpha: self.alpha.clone().map(Scalar::Text),
            beta: self.beta.clone().map(Scalar::Text),
            domain: self.domain.clone(),
            r: self.r.clone().map(Scalar::Text),
            modes: self.modes,
            starts: self.starts,
            seed: self.seed,
            max_iter: self.max_iter,
            residual_tol: self.residual_tol,
            sweep: self.sweep.clone().map(List::Text),
            counts: self.counts.clone().map(List::Text),
            out: self.out.clone(),
            emit_pgm: self.emit_pgm.then_some(true),
            field: self.field.clone(),
            matrix: self.matrix.clone(),
            from: self.from.clone(),
            to: self.to.clone(),
            ..RawConfig::default()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("NSH_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Validation(format!("NSH_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    let file = match &cli.flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            RawConfig::from_toml_str(&text)?
        }
        None => RawConfig::default(),
    };
    let cfg = RunConfig::validate(&file.overlay(cli.flags.raw()))?;
    match cli.command {
        Command::Constants => commands::cmd_constants(&cfg),
        Command::Fibration => commands::cmd_fibration(&cfg),
        Command::Solve => commands::cmd_solve(&cfg),
        Command::Sweep => commands::cmd_sweep(&cfg),
        Command::Tile => commands::cmd_tile(&cfg),
        Command::Lattice => commands::cmd_lattice(&cfg),
        Command::Verify => commands::cmd_verify(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if let Some(m) = outcome.message {
                eprintln!("{m}");
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
