//! Command-line driver: each subcommand runs one experiment and writes CSV/JSON
//! files into the output directory.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 mean-constraint violation,
//! 3 ill-conditioning, 4 configuration or argument errors.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{execute, suite, Command};
use config::Config;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "ggkdv",
    version,
    about = "Experiments for the linearized coupled KdV system on the circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON file with flat experiment keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true, value_parser = ["generic", "resonant"])]
    preset: Option<String>,

    /// Suppress the summary on stdout
    #[arg(long, global = true)]
    quiet: bool,

    /// both|u|v for `observe`, both|f_only|g_only for `control`
    #[arg(long, global = true)]
    mode: Option<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Truncation order
    #[arg(short = 'n', long = "n", global = true)]
    n: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Eigenfrequencies and eigenvectors for |k| <= N
    Spectrum,
    /// Consecutive gaps and density estimate
    Gaps,
    /// Coinciding frequencies in the truncation
    Resonance,
    /// Observability constants, swept over N and window length
    Observe,
    /// Direct and inverse Ingham constants
    Ingham,
    /// HUM steering plan with verification
    Control,
    /// Feedback gains and closed-loop decay
    Stabilize,
    /// Transposition identity on random draws
    Duality,
    /// Run the command named in the config file
    Run,
    /// Fixed reproducible set of experiments, one subdirectory each
    Suite,
}

fn configure(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if cli.preset.is_some() {
        cfg.preset = cli.preset.clone();
    }
    if cli.mode.is_some() {
        cfg.mode = cli.mode.clone();
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.n.is_some() {
        cfg.n = cli.n;
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<Vec<String>, CliError> {
    let cfg = configure(cli)?;
    let cmd = match cli.command {
        Cmd::Suite => return suite(cfg.seed(), &cli.out),
        Cmd::Run => {
            let name = cfg
                .command
                .as_deref()
                .ok_or_else(|| CliError::Config("`run` needs a `command` key".into()))?;
            name.parse()?
        }
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Gaps => Command::Gaps,
        Cmd::Resonance => Command::Resonance,
        Cmd::Observe => Command::Observe,
        Cmd::Ingham => Command::Ingham,
        Cmd::Control => Command::Control,
        Cmd::Stabilize => Command::Stabilize,
        Cmd::Duality => Command::Duality,
    };
    if let Some(name) = &cfg.command {
        if name != cmd.name() {
            return Err(CliError::Config(format!(
                "config is for `{name}`, not `{}`",
                cmd.name()
            )));
        }
    }
    execute(cmd, &cfg, &cli.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(lines) => {
            if !cli.quiet {
                for line in lines {
                    println!("{line}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
