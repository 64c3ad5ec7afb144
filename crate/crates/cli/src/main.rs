//! `nevlab`: growth profiles, boundedness criteria, Fatou-set images and
//! proof traces for meromorphic functions.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::RunConfig;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nevlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nevanlinna profile over a radius grid: profile.json, growth.json.
    Analyze(RunConfig),
    /// Boundedness criteria: criteria.json.
    Check(RunConfig),
    /// Orbit classification image: render.ppm, components.json, probe.json.
    Render(RunConfig),
    /// Constants and radii of the escaping-domain construction: trace.json.
    Trace(RunConfig),
}

type Runner = fn(&RunConfig) -> Result<(), config::Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, cfg): (Runner, RunConfig) = match cli.command {
        Command::Analyze(c) => (commands::analyze, c),
        Command::Check(c) => (commands::check, c),
        Command::Render(c) => (commands::render, c),
        Command::Trace(c) => (commands::trace, c),
    };
    match cfg.resolve().and_then(|c| run(&c)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
