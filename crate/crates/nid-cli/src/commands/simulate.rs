//! `nid simulate`: ground-truthed synthetic data from a TOML spec.
//!
//! The spec file carries a `kind` discriminator (`"series"` or
//! `"corpus"`), the generator parameters, and a mandatory seed; the truth
//! that went into the generator lands in a JSON sidecar next to the data.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use nid_core::synth::{gen_corpus, gen_series, synth_dates, SynthCorpusSpec, SynthSeriesSpec};
use serde::{Deserialize, Serialize};

use crate::io::atomic_write;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Spec TOML file with a `kind = "series" | "corpus"` field.
    pub spec: PathBuf,
    /// Output directory (overrides NID_OUT_DIR).
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

/// File form of a series spec; `seed` is checked separately so omitting it
/// gets a reproducibility message rather than a bare parse error.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesSpecFile {
    t: usize,
    tau: (usize, usize),
    mu: (f64, f64, f64),
    sigma: f64,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusSpecFile {
    days: usize,
    docs_per_day: usize,
    vocab_size: usize,
    event_window: (usize, usize),
    event_concentration: f64,
    seed: Option<u64>,
}

pub fn run(args: SimulateArgs) -> Result<()> {
    let out_dir = args
        .out_dir
        .or_else(|| std::env::var_os("NID_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("nid-out"));
    let text = fs::read_to_string(&args.spec)
        .with_context(|| format!("reading spec {}", args.spec.display()))?;
    let mut table: toml::Table =
        toml::from_str(&text).with_context(|| format!("parsing spec {}", args.spec.display()))?;
    let kind = match table.remove("kind") {
        Some(toml::Value::String(k)) => k,
        Some(_) => bail!("spec field `kind` must be a string"),
        None => bail!("spec needs a field `kind` set to \"series\" or \"corpus\""),
    };
    let seed_of = |seed: Option<u64>| {
        seed.with_context(|| {
            format!(
                "spec {} omits `seed`: seeds are mandatory for reproducibility",
                args.spec.display()
            )
        })
    };

    match kind.as_str() {
        "series" => {
            let file: SeriesSpecFile = table
                .try_into()
                .with_context(|| format!("parsing spec {}", args.spec.display()))?;
            let spec = SynthSeriesSpec {
                t: file.t,
                tau: file.tau,
                mu: file.mu,
                sigma: file.sigma,
                seed: seed_of(file.seed)?,
            };
            echo_spec(&out_dir, "series", &file)?;
            let (y, truth) = gen_series(&spec)?;
            let dates = synth_dates(spec.t);
            let mut csv = String::from("date,novelty\n");
            for (date, value) in dates.iter().zip(&y) {
                csv.push_str(&format!("{date},{value}\n"));
            }
            atomic_write(&out_dir.join("series.csv"), csv.as_bytes())?;
            let mut sidecar = serde_json::to_vec_pretty(&truth)?;
            sidecar.push(b'\n');
            atomic_write(&out_dir.join("series-truth.json"), &sidecar)?;
            println!(
                "series: {} day(s) from {}, change days ({}, {}), means ({}, {}, {}), sigma {}, seed {}",
                spec.t,
                dates[0],
                truth.tau_days.0,
                truth.tau_days.1,
                truth.mu.0,
                truth.mu.1,
                truth.mu.2,
                truth.sigma,
                truth.seed,
            );
            println!("wrote series.csv and series-truth.json");
        }
        "corpus" => {
            let file: CorpusSpecFile = table
                .try_into()
                .with_context(|| format!("parsing spec {}", args.spec.display()))?;
            let spec = SynthCorpusSpec {
                days: file.days,
                docs_per_day: file.docs_per_day,
                vocab_size: file.vocab_size,
                event_window: file.event_window,
                event_concentration: file.event_concentration,
                seed: seed_of(file.seed)?,
            };
            echo_spec(&out_dir, "corpus", &file)?;
            let (docs, truth) = gen_corpus(&spec)?;
            let mut buf = Vec::new();
            nid_core::corpus::write_jsonl(&docs, &mut buf)?;
            atomic_write(&out_dir.join("corpus.jsonl"), &buf)?;
            let mut sidecar = serde_json::to_vec_pretty(&truth)?;
            sidecar.push(b'\n');
            atomic_write(&out_dir.join("corpus-truth.json"), &sidecar)?;
            println!(
                "corpus: {} day(s) x {} document(s) from {}, event days [{}, {}), concentration {}, seed {}",
                spec.days,
                spec.docs_per_day,
                nid_core::synth::start_date(),
                truth.event_window.0,
                truth.event_window.1,
                spec.event_concentration,
                truth.seed,
            );
            println!("wrote corpus.jsonl and corpus-truth.json");
        }
        other => bail!("unknown spec kind {other:?}: expected \"series\" or \"corpus\""),
    }
    Ok(())
}

/// Echoes the parsed spec (with its kind) so the run is reproducible from
/// the output directory alone.
fn echo_spec<T: Serialize>(out_dir: &std::path::Path, kind: &str, spec: &T) -> Result<()> {
    let mut table = toml::Table::new();
    table.insert("kind".to_string(), toml::Value::String(kind.to_string()));
    let body = toml::Table::try_from(spec)?;
    table.extend(body);
    atomic_write(
        &out_dir.join("resolved-config.toml"),
        toml::to_string_pretty(&table)?.as_bytes(),
    )
}
