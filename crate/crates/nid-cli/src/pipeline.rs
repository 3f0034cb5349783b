//! The corpus-to-signals pipeline shared by `signals`, `detect`, and
//! `slopes`: ingest documents, turn them into probability distributions
//! under the configured representation, split them into streams, and
//! compute windowed signals per stream.

use std::collections::{BTreeMap, HashSet};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use nid_core::changepoint;
use nid_core::corpus::{self, NormalizeOpts};
use nid_core::infodyn::{self, aggregate_daily, compute_signals};
use nid_core::represent::{self, default_smoothing, doc_seed, tf_distribution};
use nid_core::{CpModelSpec, DocDistribution, NidReport, SignalConfig, SignalSeries};

use crate::config::{Representation, RunConfig};

/// Reads the configured input and produces one distribution per document,
/// sorted by date then id.
pub fn load_distributions(cfg: &RunConfig) -> Result<Vec<DocDistribution>> {
    let input = cfg
        .input
        .as_deref()
        .context("no input given: pass a path argument or set `input` in the config")?;
    if !input.exists() {
        bail!("input path {} does not exist", input.display());
    }
    if cfg.representation == Representation::Import {
        let dists = represent::import_distributions(input)
            .with_context(|| format!("importing distributions from {}", input.display()))?;
        if dists.is_empty() {
            bail!("input {} contains no distributions", input.display());
        }
        return Ok(dists);
    }

    let docs =
        corpus::ingest(input).with_context(|| format!("reading corpus {}", input.display()))?;
    if docs.is_empty() {
        bail!("corpus {} contains no documents", input.display());
    }
    let stopwords = match &cfg.tokenize.stopwords {
        Some(p) => corpus::load_stopwords(p)
            .with_context(|| format!("reading stopwords {}", p.display()))?,
        None => HashSet::new(),
    };
    let opts = NormalizeOpts {
        lemmas: match &cfg.tokenize.lemmas {
            Some(p) => Some(
                corpus::load_lemmas(p)
                    .with_context(|| format!("reading lemma map {}", p.display()))?,
            ),
            None => None,
        },
    };
    let tokenized: Vec<_> = docs
        .iter()
        .map(|d| corpus::normalize(d, &stopwords, &opts))
        .collect();
    let vocab = corpus::build_vocabulary(&tokenized, cfg.tokenize.min_count)?;

    match cfg.representation {
        Representation::Tf => {
            let smoothing = cfg
                .tf
                .smoothing
                .unwrap_or_else(|| default_smoothing(vocab.len()));
            tokenized
                .iter()
                .map(|d| tf_distribution(d, &vocab, smoothing).map_err(Into::into))
                .collect()
        }
        Representation::Lda => {
            let k = cfg.lda.k;
            let alpha = cfg.lda.alpha.unwrap_or(5.0 / k as f64);
            let model = represent::lda_fit(
                &tokenized,
                &vocab,
                k,
                alpha,
                cfg.lda.beta,
                cfg.lda.iterations,
                cfg.seed,
            )?;
            let inferred = represent::lda_infer_all(
                &model,
                &tokenized,
                cfg.lda.burn,
                cfg.lda.samples,
                cfg.seed,
            )?;
            let fallbacks = inferred.iter().filter(|i| i.prior_fallback).count();
            if fallbacks > 0 {
                eprintln!(
                    "warning: {fallbacks} document(s) had no in-vocabulary tokens and received the symmetric prior"
                );
            }
            Ok(inferred.into_iter().map(|i| i.dist).collect())
        }
        Representation::Import => unreachable!("handled above"),
    }
}

/// Splits distributions into the streams signals are computed over: one per
/// source, or a single `pooled` stream on request.
pub fn streams(
    dists: Vec<DocDistribution>,
    pooled: bool,
) -> BTreeMap<String, Vec<DocDistribution>> {
    if pooled {
        BTreeMap::from([("pooled".to_string(), dists)])
    } else {
        infodyn::split_by_source(&dists)
    }
}

/// Computes the signal series for one stream, optionally collapsing it to
/// daily mean distributions first.
pub fn stream_signals(
    source: &str,
    dists: &[DocDistribution],
    daily: bool,
    window: usize,
) -> Result<SignalSeries> {
    let cfg = SignalConfig { window };
    let series = if daily {
        let days = aggregate_daily(dists)?;
        compute_signals(&days, &cfg)
    } else {
        compute_signals(dists, &cfg)
    };
    series.with_context(|| {
        format!(
            "source {source:?}: need more than {} {} for window {window}",
            2 * window,
            if daily { "days" } else { "documents" },
        )
    })
}

/// The daily novelty series fed to the change-point model: values and dates
/// from the first window-complete position onward.
pub fn novelty_series(series: &SignalSeries) -> (Vec<f64>, Vec<NaiveDate>) {
    let w = series.config.window;
    series.points[w..]
        .iter()
        .map(|p| {
            let n = p
                .novelty
                .expect("novelty is defined from index w to the end of the series");
            (n, p.date)
        })
        .unzip()
}

/// Seed for one source's sampler, derived from the run seed so sources get
/// distinct, order-independent streams.
pub fn source_seed(run_seed: u64, source: &str) -> u64 {
    doc_seed(run_seed, source)
}

/// Fits the change-point model to a novelty series and classifies it.
pub fn fit_novelty(
    cfg: &RunConfig,
    source: &str,
    y: &[f64],
    dates: &[NaiveDate],
) -> Result<NidReport> {
    let model = CpModelSpec::new(y.len()).with_context(|| {
        format!(
            "source {source:?}: {} usable novelty value(s) is too short for the change-point model",
            y.len()
        )
    })?;
    let cp = &cfg.changepoint;
    let post = changepoint::sample_posterior(
        y,
        &model,
        cp.chains,
        cp.draws,
        cp.warmup,
        source_seed(cfg.seed, source),
    )?;
    changepoint::classify_nid(&post, dates, source, cp.nid_threshold, cp.hdi_mass)
        .map_err(Into::into)
}

/// End-to-end detection for one stream whose signals are already computed.
pub fn detect_from_series(
    cfg: &RunConfig,
    source: &str,
    series: &SignalSeries,
) -> Result<NidReport> {
    let (y, dates) = novelty_series(series);
    fit_novelty(cfg, source, &y, &dates)
}
