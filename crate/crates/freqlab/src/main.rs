use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freqlab::{run, Command, Invocation};

#[derive(Parser)]
#[command(name = "freqlab", version, about = "Frequency-function laboratory for elliptic unique continuation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (TOML)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for CSV and report files
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Write the solved grid to this file
    #[arg(long, value_name = "PATH")]
    dump_grid: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// List catalog fields and spot-check the configured one
    Describe(Common),
    /// Write the radial profile as CSV
    Sweep(Common),
    /// Run the verification battery and write a report
    Verify(Common),
    /// Solve the configured boundary value problem
    Solve(Common),
    /// p-power sweep plus the weak doubling check
    Doubling(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (command, c) = match cli.command {
        Cmd::Describe(c) => (Command::Describe, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Doubling(c) => (Command::Doubling, c),
    };
    let inv = Invocation { command, config: c.config, out: c.out, dump_grid: c.dump_grid };
    match run(&inv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
