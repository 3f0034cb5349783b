//! `nid ingest`: validate a corpus and write it back in canonical order.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::Args;
use nid_core::corpus;

use super::{prepare, CommonArgs};
use crate::io::atomic_write;

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Corpus JSONL file, one {id, date, source, text} object per line.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn run(args: IngestArgs) -> Result<()> {
    let mut ctx = prepare(&args.common)?;
    if let Some(input) = args.input {
        ctx.cfg.input = Some(input);
    }
    ctx.echo_config()?;

    let input = ctx
        .cfg
        .input
        .as_deref()
        .context("no input given: pass a path argument or set `input` in the config")?;
    if !input.exists() {
        bail!("input path {} does not exist", input.display());
    }
    let docs =
        corpus::ingest(input).with_context(|| format!("reading corpus {}", input.display()))?;

    let mut buf = Vec::new();
    corpus::write_jsonl(&docs, &mut buf)?;
    atomic_write(&ctx.out_dir.join("corpus.jsonl"), &buf)?;

    let mut by_source: BTreeMap<&str, (usize, NaiveDate, NaiveDate)> = BTreeMap::new();
    for d in &docs {
        by_source
            .entry(&d.source)
            .and_modify(|(n, lo, hi)| {
                *n += 1;
                *lo = (*lo).min(d.date);
                *hi = (*hi).max(d.date);
            })
            .or_insert((1, d.date, d.date));
    }
    println!("{} document(s) -> corpus.jsonl", docs.len());
    for (source, (n, lo, hi)) in by_source {
        println!("  source {source}: {n} document(s), {lo} to {hi}");
    }
    Ok(())
}
