//! `nid` — information-dynamics signals and negative-event detection for
//! dated document corpora.
//!
//! The pipeline is ingest -> represent -> signals -> change-point fit ->
//! slopes; each stage is a subcommand, every run is deterministic given its
//! configuration and seed, and each run echoes that resolved configuration
//! next to its outputs. Data and configuration errors exit nonzero;
//! statistical caveats (non-convergence, degenerate period splits) are
//! reported in the outputs and exit 0.

mod commands;
mod config;
mod io;
mod pipeline;

use clap::{Parser, Subcommand};

use commands::{detect, ingest, signals, simulate, slopes};

#[derive(Parser)]
#[command(
    name = "nid",
    version,
    about = "Novelty, transience, and resonance signals with Bayesian change-point detection for dated corpora"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a corpus and write it back in canonical order.
    Ingest(ingest::IngestArgs),
    /// Compute novelty/transience/resonance CSVs, one per source.
    Signals(signals::SignalsArgs),
    /// Fit the change-point model and report NID verdicts per source.
    Detect(detect::DetectArgs),
    /// Fit resonance-on-novelty slopes for the pre/NID/post periods.
    Slopes(slopes::SlopesArgs),
    /// Generate ground-truthed synthetic series or corpora.
    Simulate(simulate::SimulateArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Ingest(args) => ingest::run(args),
        Cmd::Signals(args) => signals::run(args),
        Cmd::Detect(args) => detect::run(args),
        Cmd::Slopes(args) => slopes::run(args),
        Cmd::Simulate(args) => simulate::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
