//! svac: compress video frame sequences into anchor plus composite
//! pairs with exact token budgeting.
//!
//! Failures print a single machine-parsable line, `error: <VariantName>:
//! <detail>`, and exit with status 1.

mod bench;
mod compress;
mod config;
mod error;
mod inspect;
mod plan;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "svac", version, about = "Anchor plus composite video frame compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a frame sequence into anchors, composites, and a manifest.
    Compress(compress::CompressArgs),
    /// Print token budgets and attention estimates across clip lengths.
    Plan(plan::PlanArgs),
    /// Rebuild one clip's pre-resize aggregate with the grid burned in.
    Inspect(inspect::InspectArgs),
    /// Time every compression method on a synthetic sequence.
    Bench(bench::BenchArgs),
}

/// Restores default SIGPIPE disposition so a closed pipe ends the process
/// quietly. Rust starts with the signal ignored, which turns writes to a
/// closed pipe into panics instead of the conventional silent exit.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe { libc::signal(libc::SIGPIPE, libc::SIG_DFL) };
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Compress(args) => compress::run(args),
        Command::Plan(args) => plan::run(args),
        Command::Inspect(args) => inspect::run(args),
        Command::Bench(args) => bench::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
