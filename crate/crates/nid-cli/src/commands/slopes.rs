//! `nid slopes`: resonance-on-novelty regression for the pre/NID/post
//! periods, one JSON row per fit.
//!
//! Period boundaries come from the config or flags when given, otherwise
//! from change-point detection run per source. A source whose periods
//! cannot be fitted (too few points, equal boundaries) contributes an error
//! row instead of aborting the other sources, and the run still exits 0:
//! a degenerate period split is a property of that source's data, not a
//! failure of the batch.

use std::path::PathBuf;

use anyhow::{bail, Result};
use chrono::NaiveDate;
use clap::Args;
use nid_core::nxr::period_slopes;
use rayon::prelude::*;
use serde::Serialize;

use super::{prepare, CommonArgs};
use crate::config::Representation;
use crate::io::{atomic_write, slug_map};
use crate::pipeline;

#[derive(Args, Debug)]
pub struct SlopesArgs {
    /// Corpus JSONL file (or a distributions file under `import`).
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// First period boundary (ISO date); requires --tau2.
    #[arg(long, value_name = "DATE")]
    pub tau1: Option<NaiveDate>,
    /// Second period boundary (ISO date); requires --tau1.
    #[arg(long, value_name = "DATE")]
    pub tau2: Option<NaiveDate>,
    /// Significance level for the slope confidence intervals.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Document representation (overrides the config file).
    #[arg(long, value_enum)]
    pub representation: Option<Representation>,
    /// Signal window width (overrides the config file).
    #[arg(long)]
    pub window: Option<usize>,
    /// Fit per-document signals instead of daily means.
    #[arg(long)]
    pub per_doc: bool,
}

/// One row of `slopes.json`: a fit, or the reason a source has none.
#[derive(Serialize)]
#[serde(untagged)]
enum SlopeRow {
    Fit {
        source: String,
        period: String,
        beta1: f64,
        ci: [f64; 2],
        n: usize,
    },
    Error {
        source: String,
        error: String,
    },
}

pub fn run(args: SlopesArgs) -> Result<()> {
    let mut ctx = prepare(&args.common)?;
    if let Some(input) = args.input {
        ctx.cfg.input = Some(input);
    }
    if let Some(t) = args.tau1 {
        ctx.cfg.slopes.tau1 = Some(t);
    }
    if let Some(t) = args.tau2 {
        ctx.cfg.slopes.tau2 = Some(t);
    }
    if let Some(a) = args.alpha {
        ctx.cfg.slopes.alpha = a;
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
    let explicit = match (ctx.cfg.slopes.tau1, ctx.cfg.slopes.tau2) {
        (Some(t1), Some(t2)) => Some((t1, t2)),
        (None, None) => None,
        _ => bail!("period boundaries tau1 and tau2 must be given together"),
    };
    ctx.echo_config()?;
    let cfg = &ctx.cfg;

    let dists = pipeline::load_distributions(cfg)?;
    let streams = pipeline::streams(dists, cfg.signals.pooled);
    let slugs = slug_map(streams.keys().map(String::as_str))?;

    // (source, boundaries or the reason there are none, fits or the reason)
    let fitted = slugs
        .par_iter()
        .map(|(source, _)| {
            let series = pipeline::stream_signals(
                source,
                &streams[*source],
                !cfg.changepoint.per_doc,
                cfg.signals.window,
            )?;
            let (bounds, detected) = match explicit {
                Some(pair) => (pair, false),
                None => {
                    let report = pipeline::detect_from_series(cfg, source, &series)?;
                    ((report.tau1.date, report.tau2.date), true)
                }
            };
            let fits = period_slopes(&series, bounds.0, bounds.1, cfg.slopes.alpha);
            Ok((source.to_string(), bounds, detected, fits))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (source, (tau1, tau2), detected, fits) in fitted {
        let origin = if detected { "detected" } else { "given" };
        println!("source {source}: pre < {tau1} <= nid < {tau2} <= post ({origin})");
        match fits {
            Ok(periods) => {
                for fit in periods {
                    println!(
                        "  {}: beta1 {:+.4}, {:.0}% CI [{:+.4}, {:+.4}], n {}",
                        fit.period,
                        fit.beta1,
                        100.0 * (1.0 - cfg.slopes.alpha),
                        fit.ci_low,
                        fit.ci_high,
                        fit.n
                    );
                    rows.push(SlopeRow::Fit {
                        source: source.clone(),
                        period: fit.period,
                        beta1: fit.beta1,
                        ci: [fit.ci_low, fit.ci_high],
                        n: fit.n,
                    });
                }
            }
            Err(e) => {
                println!("  error: {e}");
                rows.push(SlopeRow::Error {
                    source: source.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    let mut buf = serde_json::to_vec_pretty(&rows)?;
    buf.push(b'\n');
    atomic_write(&ctx.out_dir.join("slopes.json"), &buf)?;
    Ok(())
}
