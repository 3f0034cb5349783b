//! Run configuration.
//!
//! Every pipeline subcommand reads one optional TOML file and applies its
//! command-line flags on top, so precedence is flags > config file > the
//! `NID_OUT_DIR` environment variable (output directory only) > built-in
//! defaults. The fully resolved configuration is echoed to
//! `resolved-config.toml` in the output directory, so any run can be
//! reproduced from its outputs alone.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// How documents become probability vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Smoothed term frequencies over the corpus vocabulary.
    Tf,
    /// Topic mixtures from the built-in collapsed-Gibbs LDA model.
    Lda,
    /// Externally computed distributions read straight from the input.
    Import,
}

/// One run's worth of settings, all optional in the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus (or, for `import`, distribution) input path. A positional
    /// command-line argument takes precedence.
    pub input: Option<PathBuf>,
    /// Precomputed novelty series for `detect --series`.
    pub series: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Base RNG seed; per-source and per-document streams are derived from
    /// it, so one value pins the whole run.
    pub seed: u64,
    pub representation: Representation,
    pub tokenize: TokenizeCfg,
    pub tf: TfCfg,
    pub lda: LdaCfg,
    pub signals: SignalsCfg,
    pub changepoint: ChangepointCfg,
    pub slopes: SlopesCfg,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            series: None,
            out_dir: None,
            seed: 0,
            representation: Representation::Tf,
            tokenize: TokenizeCfg::default(),
            tf: TfCfg::default(),
            lda: LdaCfg::default(),
            signals: SignalsCfg::default(),
            changepoint: ChangepointCfg::default(),
            slopes: SlopesCfg::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizeCfg {
    /// Stopword file: one casefolded token per line.
    pub stopwords: Option<PathBuf>,
    /// Lemma map: "surface<TAB>lemma" per line.
    pub lemmas: Option<PathBuf>,
    /// Minimum corpus frequency for a token to enter the vocabulary.
    pub min_count: usize,
}

impl Default for TokenizeCfg {
    fn default() -> Self {
        Self {
            stopwords: None,
            lemmas: None,
            min_count: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfCfg {
    /// Additive smoothing; when unset, half a pseudo-count spread over the
    /// vocabulary (0.5 / V).
    pub smoothing: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaCfg {
    pub k: usize,
    /// Document-topic prior; when unset, 5 / k.
    pub alpha: Option<f64>,
    pub beta: f64,
    /// Gibbs sweeps for fitting.
    pub iterations: usize,
    /// Discarded fold-in sweeps per document at inference time.
    pub burn: usize,
    /// Averaged fold-in sweeps per document.
    pub samples: usize,
}

impl Default for LdaCfg {
    fn default() -> Self {
        Self {
            k: 20,
            alpha: None,
            beta: 0.01,
            iterations: 500,
            burn: 50,
            samples: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalsCfg {
    /// Window width w, in series positions.
    pub window: usize,
    /// Collapse each day to one mean distribution before computing
    /// signals. The `signals` command defaults to per-document mode.
    pub daily: bool,
    /// Treat the whole corpus as one stream instead of one per source.
    pub pooled: bool,
}

impl Default for SignalsCfg {
    fn default() -> Self {
        Self {
            window: 7,
            daily: false,
            pooled: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChangepointCfg {
    pub chains: usize,
    /// Retained draws per chain.
    pub draws: usize,
    pub warmup: usize,
    /// Fit the model on per-document novelty instead of daily means.
    pub per_doc: bool,
    pub hdi_mass: f64,
    /// Posterior ordering probability both NID comparisons must exceed.
    pub nid_threshold: f64,
}

impl Default for ChangepointCfg {
    fn default() -> Self {
        Self {
            chains: 4,
            draws: 1000,
            warmup: 1000,
            per_doc: false,
            hdi_mass: nid_core::changepoint::HDI_MASS,
            nid_threshold: nid_core::changepoint::NID_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlopesCfg {
    /// Confidence level is 1 − alpha.
    pub alpha: f64,
    /// Explicit period boundaries; when either is unset the boundaries
    /// come from change-point detection per source.
    pub tau1: Option<NaiveDate>,
    pub tau2: Option<NaiveDate>,
}

impl Default for SlopesCfg {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            tau1: None,
            tau2: None,
        }
    }
}

impl RunConfig {
    /// Defaults when `path` is `None`, otherwise the parsed file; unknown
    /// keys are rejected with the offending name.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }

    /// Output directory after full precedence resolution.
    pub fn resolve_out_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.out_dir.clone())
            .or_else(|| std::env::var_os("NID_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("nid-out"))
    }
}
