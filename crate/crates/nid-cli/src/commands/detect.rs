//! `nid detect`: change-point fits and NID verdicts, one per stream.
//!
//! A non-converged fit is reported, flagged in the JSON trace, and warned
//! about on stderr, but does not fail the run: convergence is a property of
//! the inference, not of the input data.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::Args;
use nid_core::NidReport;
use rayon::prelude::*;

use super::{prepare, CommonArgs, Ctx};
use crate::config::Representation;
use crate::io::{atomic_write, file_slug, slug_map};
use crate::pipeline;

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Corpus JSONL file (or a distributions file under `import`).
    #[arg(conflicts_with = "series")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Precomputed novelty series CSV with header `date,novelty`; the file
    /// stem becomes the source name.
    #[arg(long, value_name = "FILE")]
    pub series: Option<PathBuf>,
    /// Document representation (overrides the config file).
    #[arg(long, value_enum)]
    pub representation: Option<Representation>,
    /// Signal window width (overrides the config file).
    #[arg(long)]
    pub window: Option<usize>,
    /// Fit per-document novelty instead of daily means.
    #[arg(long)]
    pub per_doc: bool,
    /// Number of chains (overrides the config file).
    #[arg(long)]
    pub chains: Option<usize>,
    /// Retained draws per chain (overrides the config file).
    #[arg(long)]
    pub draws: Option<usize>,
    /// Warmup sweeps per chain (overrides the config file).
    #[arg(long)]
    pub warmup: Option<usize>,
}

pub fn run(args: DetectArgs) -> Result<()> {
    let mut ctx = prepare(&args.common)?;
    if let Some(input) = args.input {
        ctx.cfg.input = Some(input);
    }
    if let Some(series) = args.series {
        ctx.cfg.series = Some(series);
    }
    if let Some(r) = args.representation {
        ctx.cfg.representation = r;
    }
    if let Some(w) = args.window {
        ctx.cfg.signals.window = w;
    }
    if args.per_doc {
        ctx.cfg.changepoint.per_doc = true;
    }
    if let Some(c) = args.chains {
        ctx.cfg.changepoint.chains = c;
    }
    if let Some(d) = args.draws {
        ctx.cfg.changepoint.draws = d;
    }
    if let Some(w) = args.warmup {
        ctx.cfg.changepoint.warmup = w;
    }
    ctx.echo_config()?;

    let reports = match ctx.cfg.series.clone() {
        Some(path) => vec![detect_series_file(&ctx, &path)?],
        None => detect_corpus(&ctx)?,
    };

    for report in &reports {
        let mut buf = serde_json::to_vec_pretty(report)?;
        buf.push(b'\n');
        let name = format!("report-{}.json", file_slug(&report.source));
        atomic_write(&ctx.out_dir.join(name), &buf)?;
    }
    print_table(&reports);
    for report in &reports {
        if !report.trace.converged {
            eprintln!(
                "warning: source {}: chains did not converge (max rhat {:.3}); the report is emitted but should not be trusted",
                report.source, report.rhat
            );
        }
    }
    Ok(())
}

fn detect_corpus(ctx: &Ctx) -> Result<Vec<NidReport>> {
    let cfg = &ctx.cfg;
    let dists = pipeline::load_distributions(cfg)?;
    let streams = pipeline::streams(dists, cfg.signals.pooled);
    let slugs = slug_map(streams.keys().map(String::as_str))?;
    slugs
        .par_iter()
        .map(|(source, _)| {
            let series = pipeline::stream_signals(
                source,
                &streams[*source],
                !cfg.changepoint.per_doc,
                cfg.signals.window,
            )?;
            pipeline::detect_from_series(cfg, source, &series)
        })
        .collect()
}

fn detect_series_file(ctx: &Ctx, path: &Path) -> Result<NidReport> {
    let (source, y, dates) = read_series(path)?;
    pipeline::fit_novelty(&ctx.cfg, &source, &y, &dates)
}

/// Reads a `date,novelty` CSV into a series, requiring strictly increasing
/// dates and finite values.
fn read_series(path: &Path) -> Result<(String, Vec<f64>, Vec<NaiveDate>)> {
    if !path.exists() {
        bail!("series path {} does not exist", path.display());
    }
    let source = path
        .file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .unwrap_or_else(|| "series".to_string());
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading series {}", path.display()))?;
    let headers: Vec<&str> = reader.headers()?.iter().collect();
    if headers != ["date", "novelty"] {
        bail!(
            "series {} must have header `date,novelty`, got {:?}",
            path.display(),
            headers.join(",")
        );
    }
    let mut y = Vec::new();
    let mut dates: Vec<NaiveDate> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // header is line 1
        let record = record.with_context(|| format!("series {} row {row}", path.display()))?;
        if record.len() != 2 {
            bail!(
                "series {} row {row}: expected 2 fields, got {}",
                path.display(),
                record.len()
            );
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").with_context(|| {
            format!(
                "series {} row {row}: bad date {:?}",
                path.display(),
                &record[0]
            )
        })?;
        let value: f64 = record[1].parse().with_context(|| {
            format!(
                "series {} row {row}: bad novelty {:?}",
                path.display(),
                &record[1]
            )
        })?;
        if !value.is_finite() {
            bail!(
                "series {} row {row}: novelty must be finite",
                path.display()
            );
        }
        if let Some(last) = dates.last() {
            if *last >= date {
                bail!(
                    "series {} row {row}: dates must be strictly increasing",
                    path.display()
                );
            }
        }
        dates.push(date);
        y.push(value);
    }
    Ok((source, y, dates))
}

fn print_table(reports: &[NidReport]) {
    let header = ["Source", "NID Start [HDI]", "NID End [HDI]", "NID"];
    let rows: Vec<[String; 4]> = reports
        .iter()
        .map(|r| {
            [
                r.source.clone(),
                format!("{} [{}, {}]", r.tau1.date, r.tau1.hdi[0], r.tau1.hdi[1]),
                format!("{} [{}, {}]", r.tau2.date, r.tau2.hdi[0], r.tau2.hdi[1]),
                if r.nid_supported { "True" } else { "False" }.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let print_row = |cells: [&str; 4]| {
        let mut line = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if i + 1 < cells.len() {
                line.push_str(&" ".repeat(w - cell.len()));
            }
        }
        println!("{line}");
    };
    print_row(header);
    for row in &rows {
        print_row([&row[0], &row[1], &row[2], &row[3]]);
    }
}
