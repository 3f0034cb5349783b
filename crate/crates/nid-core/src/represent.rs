//! Document representations on the probability simplex.
//!
//! Downstream signal computation consumes one strictly positive simplex
//! vector per document. Three routes produce them: smoothed term
//! frequencies ([`tf_distribution`]), a collapsed-Gibbs LDA topic model
//! ([`lda_fit`] / [`lda_infer`]), and externally computed vectors
//! ([`import_distributions`]).

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{TokenizedDoc, Vocabulary};
use crate::error::{Error, Result};

/// Simplex-sum tolerance enforced on construction.
const SUM_TOL: f64 = 1e-9;
/// Sum tolerance accepted for imported rows before exact renormalization.
const IMPORT_SUM_TOL: f64 = 1e-6;
/// Floor applied to imported components so divergences stay finite.
const IMPORT_FLOOR: f64 = 1e-12;

/// A document as a strictly positive probability vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DocDistribution {
    pub id: String,
    pub date: NaiveDate,
    pub source: String,
    pub p: Vec<f64>,
}

impl DocDistribution {
    /// Validates strict positivity and unit sum (within 1e-9).
    pub fn new(
        id: impl Into<String>,
        date: NaiveDate,
        source: impl Into<String>,
        p: Vec<f64>,
    ) -> Result<Self> {
        let id = id.into();
        if p.is_empty() {
            return Err(Error::InvalidDistribution {
                id,
                reason: "empty probability vector".into(),
            });
        }
        for (i, &v) in p.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidDistribution {
                    id,
                    reason: format!("component {i} is {v}; must be finite and strictly positive"),
                });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution {
                id,
                reason: format!("components sum to {sum}; must equal 1 within {SUM_TOL:e}"),
            });
        }
        Ok(Self {
            id,
            date,
            source: source.into(),
            p,
        })
    }
}

/// Default term-frequency smoothing: half a pseudo-count spread across the
/// vocabulary.
pub fn default_smoothing(vocab_size: usize) -> f64 {
    0.5 / vocab_size as f64
}

/// Additively smoothed term frequencies over the vocabulary:
/// p\[i\] = (count_i + smoothing) / (in_vocab_total + smoothing·V).
/// Out-of-vocabulary tokens are ignored.
pub fn tf_distribution(
    doc: &TokenizedDoc,
    vocab: &Vocabulary,
    smoothing: f64,
) -> Result<DocDistribution> {
    if !(smoothing > 0.0) {
        return Err(Error::config(format!(
            "smoothing must be positive, got {smoothing}"
        )));
    }
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let v = vocab.len();
    let mut counts = vec![0usize; v];
    let mut total = 0usize;
    for t in &doc.tokens {
        if let Some(i) = vocab.get(t) {
            counts[i] += 1;
            total += 1;
        }
    }
    let denom = total as f64 + smoothing * v as f64;
    let p = counts
        .iter()
        .map(|&c| (c as f64 + smoothing) / denom)
        .collect();
    DocDistribution::new(doc.id.clone(), doc.date, doc.source.clone(), p)
}

/// A fitted LDA topic model (collapsed Gibbs). The vocabulary is kept so
/// that inference on new documents is self-contained.
#[derive(Clone, Debug)]
pub struct LdaModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Per-topic term counts: k rows of vocab-size entries.
    pub topic_term_counts: Vec<Vec<u32>>,
    pub seed: u64,
    pub iterations: usize,
    pub vocab: Vocabulary,
}

impl LdaModel {
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    fn topic_totals(&self) -> Vec<u64> {
        self.topic_term_counts
            .iter()
            .map(|row| row.iter().map(|&c| c as u64).sum())
            .collect()
    }
}

/// Result of [`lda_infer`]: the inferred topic mixture, plus a flag set when
/// the document had no in-vocabulary tokens and the symmetric prior was
/// returned instead.
#[derive(Clone, Debug)]
pub struct LdaInference {
    pub dist: DocDistribution,
    pub prior_fallback: bool,
}

/// Fit an LDA model by collapsed Gibbs sampling. Deterministic given the
/// seed. Documents without in-vocabulary tokens contribute nothing; if all
/// documents are empty this is an error.
pub fn lda_fit(
    docs: &[TokenizedDoc],
    vocab: &Vocabulary,
    k: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
) -> Result<LdaModel> {
    if k < 2 {
        return Err(Error::config(format!("lda needs k >= 2, got {k}")));
    }
    if iterations == 0 {
        return Err(Error::config("lda needs at least one Gibbs sweep"));
    }
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::config(format!(
            "lda priors must be positive, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let v = vocab.len();
    let token_ids: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.tokens.iter().filter_map(|t| vocab.get(t)).collect())
        .collect();
    let distinct: HashSet<usize> = token_ids.iter().flatten().copied().collect();
    if distinct.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if k > distinct.len() {
        return Err(Error::config(format!(
            "k = {k} exceeds the {} distinct in-vocabulary tokens",
            distinct.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_dk = vec![vec![0u32; k]; token_ids.len()];
    let mut n_kw = vec![vec![0u32; v]; k];
    let mut n_k = vec![0u64; k];
    let mut z: Vec<Vec<usize>> = token_ids
        .iter()
        .map(|toks| toks.iter().map(|_| rng.gen_range(0..k)).collect())
        .collect();
    for (d, toks) in token_ids.iter().enumerate() {
        for (i, &w) in toks.iter().enumerate() {
            let t = z[d][i];
            n_dk[d][t] += 1;
            n_kw[t][w] += 1;
            n_k[t] += 1;
        }
    }

    let beta_v = beta * v as f64;
    let mut cum = vec![0.0f64; k];
    for _ in 0..iterations {
        for (d, toks) in token_ids.iter().enumerate() {
            for (i, &w) in toks.iter().enumerate() {
                let old = z[d][i];
                n_dk[d][old] -= 1;
                n_kw[old][w] -= 1;
                n_k[old] -= 1;
                let mut acc = 0.0;
                for t in 0..k {
                    acc += (n_dk[d][t] as f64 + alpha) * (n_kw[t][w] as f64 + beta)
                        / (n_k[t] as f64 + beta_v);
                    cum[t] = acc;
                }
                let u = rng.gen::<f64>() * acc;
                let new = cum.partition_point(|&c| c <= u).min(k - 1);
                z[d][i] = new;
                n_dk[d][new] += 1;
                n_kw[new][w] += 1;
                n_k[new] += 1;
            }
        }
    }

    Ok(LdaModel {
        k,
        alpha,
        beta,
        topic_term_counts: n_kw,
        seed,
        iterations,
        vocab: vocab.clone(),
    })
}

/// Infer a topic mixture for one document against a fitted model (fold-in
/// Gibbs with the model's term counts held fixed). `burn` sweeps are
/// discarded, then `samples` sweeps are averaged. Deterministic given the
/// seed. A document with no in-vocabulary tokens yields the symmetric prior
/// with `prior_fallback` set.
pub fn lda_infer(
    model: &LdaModel,
    doc: &TokenizedDoc,
    burn: usize,
    samples: usize,
    seed: u64,
) -> Result<LdaInference> {
    if samples == 0 {
        return Err(Error::config("lda inference needs samples >= 1"));
    }
    let k = model.k;
    let ids: Vec<usize> = doc
        .tokens
        .iter()
        .filter_map(|t| model.vocab.get(t))
        .collect();
    if ids.is_empty() {
        let dist = DocDistribution::new(
            doc.id.clone(),
            doc.date,
            doc.source.clone(),
            vec![1.0 / k as f64; k],
        )?;
        return Ok(LdaInference {
            dist,
            prior_fallback: true,
        });
    }

    let totals = model.topic_totals();
    let beta_v = model.beta * model.vocab_size() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_dk = vec![0u32; k];
    let mut z: Vec<usize> = ids.iter().map(|_| rng.gen_range(0..k)).collect();
    for &t in &z {
        n_dk[t] += 1;
    }

    let mut theta_acc = vec![0.0f64; k];
    let mut cum = vec![0.0f64; k];
    for sweep in 0..(burn + samples) {
        for (i, &w) in ids.iter().enumerate() {
            let old = z[i];
            n_dk[old] -= 1;
            let mut acc = 0.0;
            for t in 0..k {
                acc += (n_dk[t] as f64 + model.alpha)
                    * (model.topic_term_counts[t][w] as f64 + model.beta)
                    / (totals[t] as f64 + beta_v);
                cum[t] = acc;
            }
            let u = rng.gen::<f64>() * acc;
            let new = cum.partition_point(|&c| c <= u).min(k - 1);
            z[i] = new;
            n_dk[new] += 1;
        }
        if sweep >= burn {
            let denom = ids.len() as f64 + k as f64 * model.alpha;
            for t in 0..k {
                theta_acc[t] += (n_dk[t] as f64 + model.alpha) / denom;
            }
        }
    }

    let mut p: Vec<f64> = theta_acc.iter().map(|&a| a / samples as f64).collect();
    let s: f64 = p.iter().sum();
    for v in &mut p {
        *v /= s;
    }
    let dist = DocDistribution::new(doc.id.clone(), doc.date, doc.source.clone(), p)?;
    Ok(LdaInference {
        dist,
        prior_fallback: false,
    })
}

/// Infer mixtures for many documents in parallel, each with its own RNG
/// stream derived from (base_seed, doc id), so results do not depend on
/// scheduling or document order.
pub fn lda_infer_all(
    model: &LdaModel,
    docs: &[TokenizedDoc],
    burn: usize,
    samples: usize,
    base_seed: u64,
) -> Result<Vec<LdaInference>> {
    docs.par_iter()
        .map(|d| lda_infer(model, d, burn, samples, doc_seed(base_seed, &d.id)))
        .collect()
}

/// Deterministic per-item RNG seed: FNV-1a over the base seed's bytes
/// followed by the id's bytes.
pub fn doc_seed(base: u64, id: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x100_0000_01b3;
    let mut h = OFFSET;
    for b in base.to_le_bytes() {
        h = (h ^ b as u64).wrapping_mul(PRIME);
    }
    for b in id.as_bytes() {
        h = (h ^ *b as u64).wrapping_mul(PRIME);
    }
    h
}

/// Read externally computed distributions from JSONL (objects with id,
/// date, source, p) or CSV (columns id, date, source, then one column per
/// component). Rows must be non-negative and sum to 1 within 1e-6; they are
/// then floored at 1e-12 and renormalized exactly. The result is sorted by
/// (date, id).
pub fn import_distributions(path: impl AsRef<Path>) -> Result<Vec<DocDistribution>> {
    let path = path.as_ref();
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let mut dists = if is_csv {
        import_csv(path)?
    } else {
        import_jsonl(path)?
    };
    if let Some(first) = dists.first() {
        let k = first.p.len();
        if let Some(bad) = dists.iter().find(|d| d.p.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: bad.p.len(),
            });
        }
    }
    dists.sort_unstable_by(|a, b| (a.date, a.id.as_str()).cmp(&(b.date, b.id.as_str())));
    Ok(dists)
}

fn import_jsonl(path: &Path) -> Result<Vec<DocDistribution>> {
    #[derive(Deserialize)]
    struct Raw {
        id: String,
        date: String,
        source: String,
        p: Vec<f64>,
    }
    let file = File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let rowno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: Raw =
            serde_json::from_str(&line).map_err(|e| Error::parse(rowno, e.to_string()))?;
        out.push(finish_row(raw.id, &raw.date, raw.source, raw.p, rowno)?);
    }
    Ok(out)
}

fn import_csv(path: &Path) -> Result<Vec<DocDistribution>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let fixed = ["id", "date", "source"];
    for (i, want) in fixed.iter().enumerate() {
        let got = headers.get(i).unwrap_or("");
        if !got.eq_ignore_ascii_case(want) {
            return Err(Error::parse(
                1,
                format!("expected column {} to be {want:?}, got {got:?}", i + 1),
            ));
        }
    }
    if headers.len() < 4 {
        return Err(Error::parse(1, "no probability columns".to_string()));
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let rowno = i + 2; // 1-based, after the header line
        let record = record?;
        let id = record.get(0).unwrap_or("").to_string();
        let date = record.get(1).unwrap_or("").to_string();
        let source = record.get(2).unwrap_or("").to_string();
        let p = record
            .iter()
            .skip(3)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(rowno, format!("bad probability {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(finish_row(id, &date, source, p, rowno)?);
    }
    Ok(out)
}

fn finish_row(
    id: String,
    date: &str,
    source: String,
    p: Vec<f64>,
    rowno: usize,
) -> Result<DocDistribution> {
    let parsed = NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|_| {
        Error::parse(
            rowno,
            format!("record {id:?}: invalid date {date:?} (expected YYYY-MM-DD)"),
        )
    })?;
    if p.is_empty() {
        return Err(Error::InvalidDistribution {
            id,
            reason: format!("row {rowno}: no components"),
        });
    }
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidDistribution {
                id,
                reason: format!("row {rowno}: component {i} is {v}; must be non-negative"),
            });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > IMPORT_SUM_TOL {
        return Err(Error::InvalidDistribution {
            id,
            reason: format!("row {rowno}: components sum to {sum}, outside 1 ± {IMPORT_SUM_TOL:e}"),
        });
    }
    let mut q: Vec<f64> = p.iter().map(|&v| v.max(IMPORT_FLOOR)).collect();
    let s: f64 = q.iter().sum();
    for v in &mut q {
        *v /= s;
    }
    DocDistribution::new(id, parsed, source, q)
}
