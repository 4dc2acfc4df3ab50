use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac_timeop::config::{parse_config_with, Mode};
use dirac_timeop::run::{exit_code, run, EXIT_INVALID};

#[derive(Parser)]
#[command(name = "timeop", version, about = "Dirac time-operator lab and attoclock tunneling times")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path; a key=value summary goes to <out>.summary
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override a configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evolve a packet and fit the drift of <x> and <T>
    Evolve,
    /// Uncertainty reports for a family of packets
    Uncertainty,
    /// Barrier widths and tunneling times
    Tunneling,
    /// Run every invariant suite
    Selfcheck,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mode = match cli.command {
        Command::Evolve => Mode::Evolve,
        Command::Uncertainty => Mode::Uncertainty,
        Command::Tunneling => Mode::Tunneling,
        Command::Selfcheck => Mode::Selfcheck,
    };
    let text = match &cli.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(EXIT_INVALID);
            }
        },
        None => String::new(),
    };
    let mut overrides = cli.set.clone();
    if let Some(out) = &cli.out {
        overrides.push(format!("out={}", out.display()));
    }
    let result = parse_config_with(&text, Some(mode), &overrides).and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, out)) => {
            if cfg.out.is_none() || mode == Mode::Selfcheck {
                print!("{}", out.primary);
            }
            if cfg.out.is_none() {
                eprint!("{}", out.summary);
            }
            ExitCode::from(out.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
