//! `nid signals`: novelty/transience/resonance CSVs, one per stream.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use rayon::prelude::*;

use super::{prepare, CommonArgs};
use crate::config::Representation;
use crate::io::{atomic_write, slug_map};
use crate::pipeline;

#[derive(Args, Debug)]
pub struct SignalsArgs {
    /// Corpus JSONL file (or a distributions file under `import`).
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Document representation (overrides the config file).
    #[arg(long, value_enum)]
    pub representation: Option<Representation>,
    /// Signal window width (overrides the config file).
    #[arg(long)]
    pub window: Option<usize>,
    /// Collapse each day to one mean distribution before computing signals.
    #[arg(long)]
    pub daily: bool,
    /// Compute one pooled stream instead of one per source.
    #[arg(long)]
    pub pooled: bool,
}

pub fn run(args: SignalsArgs) -> Result<()> {
    let mut ctx = prepare(&args.common)?;
    if let Some(input) = args.input {
        ctx.cfg.input = Some(input);
    }
    if let Some(r) = args.representation {
        ctx.cfg.representation = r;
    }
    if let Some(w) = args.window {
        ctx.cfg.signals.window = w;
    }
    if args.daily {
        ctx.cfg.signals.daily = true;
    }
    if args.pooled {
        ctx.cfg.signals.pooled = true;
    }
    ctx.echo_config()?;
    let cfg = &ctx.cfg;

    let dists = pipeline::load_distributions(cfg)?;
    let streams = pipeline::streams(dists, cfg.signals.pooled);
    let slugs = slug_map(streams.keys().map(String::as_str))?;

    let written = slugs
        .par_iter()
        .map(|(source, slug)| {
            let series = pipeline::stream_signals(
                source,
                &streams[*source],
                cfg.signals.daily,
                cfg.signals.window,
            )?;
            let mut buf = Vec::new();
            series.to_csv(&mut buf)?;
            let name = format!("signals-{slug}.csv");
            atomic_write(&ctx.out_dir.join(&name), &buf)?;
            Ok((source.to_string(), name, series.points.len()))
        })
        .collect::<Result<Vec<_>>>()?;

    for (source, name, rows) in written {
        println!("source {source}: {rows} row(s) -> {name}");
    }
    Ok(())
}
