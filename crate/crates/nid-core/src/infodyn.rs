//! Information dynamics over a dated sequence of distributions.
//!
//! For a sorted series s_0..s_{n-1} of simplex vectors and a window w,
//! novelty at position j is the mean Jensen-Shannon divergence (in bits)
//! between s_j and its w predecessors, transience is the mirror over the w
//! successors, and resonance is novelty minus transience. Novelty is
//! defined on [w, n-1], transience on [0, n-1-w], resonance on their
//! intersection [w, n-1-w].
//!
//! Divergence terms are accumulated in a fixed order (offset 1..w, then
//! components left to right), so results are bit-for-bit reproducible.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::represent::DocDistribution;

/// Kullback-Leibler divergence KLD(p ‖ q) in bits. Terms with p_i = 0 are
/// skipped; a component with p_i > 0 and q_i = 0 yields +∞.
pub fn kld(p: &[f64], q: &[f64]) -> Result<f64> {
    validate_pair(p, q)?;
    let mut acc = 0.0;
    for i in 0..p.len() {
        if p[i] > 0.0 {
            acc += p[i] * (p[i] / q[i]).log2();
        }
    }
    Ok(acc)
}

/// Jensen-Shannon divergence in bits:
/// JSD(p, q) = ½ KLD(p ‖ m) + ½ KLD(q ‖ m) with m = (p + q)/2.
///
/// Always finite and within [0, 1]; zeros in either input are safe because
/// m is positive wherever a numerator is. Bit-for-bit symmetric in its
/// arguments.
pub fn jsd(p: &[f64], q: &[f64]) -> Result<f64> {
    validate_pair(p, q)?;
    let mut term_p = 0.0;
    let mut term_q = 0.0;
    for i in 0..p.len() {
        let m = 0.5 * (p[i] + q[i]);
        if p[i] > 0.0 {
            term_p += p[i] * (p[i] / m).log2();
        }
        if q[i] > 0.0 {
            term_q += q[i] * (q[i] / m).log2();
        }
    }
    // Guard against roundoff just outside the mathematical range.
    Ok((0.5 * term_p + 0.5 * term_q).clamp(0.0, 1.0))
}

/// Tolerance on the unit sum accepted by [`kld`] and [`jsd`].
const PAIR_SUM_TOL: f64 = 1e-6;

fn validate_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    for (name, v) in [("p", p), ("q", q)] {
        if v.is_empty() {
            return Err(Error::InvalidDistribution {
                id: name.into(),
                reason: "empty vector".into(),
            });
        }
        for (i, &x) in v.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidDistribution {
                    id: name.into(),
                    reason: format!("component {i} is {x}; must be finite and non-negative"),
                });
            }
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > PAIR_SUM_TOL {
            return Err(Error::InvalidDistribution {
                id: name.into(),
                reason: format!("components sum to {sum}; must equal 1 within {PAIR_SUM_TOL:e}"),
            });
        }
    }
    Ok(())
}

/// Windowed novelty at position `j`: mean JSD against the `w` predecessors.
/// `Ok(None)` when `j < w` (not enough history).
pub fn novelty(dists: &[DocDistribution], j: usize, w: usize) -> Result<Option<f64>> {
    check_point(dists, j, w)?;
    if j < w {
        return Ok(None);
    }
    let mut acc = 0.0;
    for d in 1..=w {
        acc += jsd(&dists[j].p, &dists[j - d].p)?;
    }
    Ok(Some(acc / w as f64))
}

/// Windowed transience at position `j`: mean JSD against the `w`
/// successors. `Ok(None)` when fewer than `w` points follow.
pub fn transience(dists: &[DocDistribution], j: usize, w: usize) -> Result<Option<f64>> {
    check_point(dists, j, w)?;
    if j + w > dists.len() - 1 {
        return Ok(None);
    }
    let mut acc = 0.0;
    for d in 1..=w {
        acc += jsd(&dists[j].p, &dists[j + d].p)?;
    }
    Ok(Some(acc / w as f64))
}

/// Resonance at position `j`: novelty minus transience, defined only where
/// both are.
pub fn resonance(dists: &[DocDistribution], j: usize, w: usize) -> Result<Option<f64>> {
    let n = novelty(dists, j, w)?;
    let t = transience(dists, j, w)?;
    Ok(match (n, t) {
        (Some(n), Some(t)) => Some(n - t),
        _ => None,
    })
}

fn check_point(dists: &[DocDistribution], j: usize, w: usize) -> Result<()> {
    if w == 0 {
        return Err(Error::config("window must be at least 1"));
    }
    if j >= dists.len() {
        return Err(Error::config(format!(
            "position {j} is out of range for a series of length {}",
            dists.len()
        )));
    }
    Ok(())
}

/// Parameters for signal extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalConfig {
    /// Window width w, in series positions.
    pub window: usize,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self { window: 7 }
    }
}

/// Signals for one series position. Fields are `None` where the
/// corresponding signal is undefined near the series edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalPoint {
    pub id: String,
    pub date: NaiveDate,
    pub source: String,
    pub novelty: Option<f64>,
    pub transience: Option<f64>,
    pub resonance: Option<f64>,
}

/// Signals for a whole series, one point per input distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSeries {
    pub points: Vec<SignalPoint>,
    pub config: SignalConfig,
}

impl SignalSeries {
    /// Inclusive index range where resonance is defined: `[w, n-1-w]`.
    pub fn valid_range(&self) -> Option<(usize, usize)> {
        let n = self.points.len();
        let w = self.config.window;
        if n > 2 * w {
            Some((w, n - 1 - w))
        } else {
            None
        }
    }

    /// Write the series as CSV with header
    /// `id,date,source,novelty,transience,resonance`; undefined signals
    /// become empty fields.
    pub fn to_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["id", "date", "source", "novelty", "transience", "resonance"])?;
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.points {
            wtr.write_record([
                p.id.as_str(),
                &p.date.to_string(),
                p.source.as_str(),
                &fmt(p.novelty),
                &fmt(p.transience),
                &fmt(p.resonance),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Compute novelty, transience and resonance for every position of a
/// series sorted by (date, id). Requires n > 2w so that at least one
/// position carries a defined resonance.
pub fn compute_signals(dists: &[DocDistribution], config: &SignalConfig) -> Result<SignalSeries> {
    let w = config.window;
    if w == 0 {
        return Err(Error::config("window must be at least 1"));
    }
    let n = dists.len();
    if (n as u128) <= 2 * (w as u128) {
        return Err(Error::SeriesTooShort { n, w });
    }
    check_sorted(dists)?;
    check_dims(dists)?;
    let points = (0..n)
        .into_par_iter()
        .map(|j| -> Result<SignalPoint> {
            let nv = novelty(dists, j, w)?;
            let tr = transience(dists, j, w)?;
            let rs = match (nv, tr) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            };
            Ok(SignalPoint {
                id: dists[j].id.clone(),
                date: dists[j].date,
                source: dists[j].source.clone(),
                novelty: nv,
                transience: tr,
                resonance: rs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SignalSeries {
        points,
        config: *config,
    })
}

fn check_sorted(dists: &[DocDistribution]) -> Result<()> {
    for i in 1..dists.len() {
        let prev = (&dists[i - 1].date, dists[i - 1].id.as_str());
        let here = (&dists[i].date, dists[i].id.as_str());
        if prev > here {
            return Err(Error::Unsorted { at: i });
        }
    }
    Ok(())
}

fn check_dims(dists: &[DocDistribution]) -> Result<()> {
    if let Some(first) = dists.first() {
        let k = first.p.len();
        if let Some(bad) = dists.iter().find(|d| d.p.len() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: bad.p.len(),
            });
        }
    }
    Ok(())
}

/// Collapse a sorted series to one distribution per calendar day: the
/// component-wise mean of that day's documents, renormalized. The day's
/// ISO date becomes the id; the source is taken from the day's first
/// document.
pub fn aggregate_daily(dists: &[DocDistribution]) -> Result<Vec<DocDistribution>> {
    check_sorted(dists)?;
    check_dims(dists)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < dists.len() {
        let day = dists[i].date;
        let k = dists[i].p.len();
        let mut acc = vec![0.0f64; k];
        let mut count = 0usize;
        let source = dists[i].source.clone();
        while i < dists.len() && dists[i].date == day {
            for (a, &v) in acc.iter_mut().zip(&dists[i].p) {
                *a += v;
            }
            count += 1;
            i += 1;
        }
        let sum: f64 = acc.iter().sum();
        for a in &mut acc {
            *a /= sum;
        }
        debug_assert!(count > 0);
        out.push(DocDistribution::new(day.to_string(), day, source, acc)?);
    }
    Ok(out)
}

/// Partition a series by source, preserving the input order within each
/// group.
pub fn split_by_source(dists: &[DocDistribution]) -> BTreeMap<String, Vec<DocDistribution>> {
    let mut map: BTreeMap<String, Vec<DocDistribution>> = BTreeMap::new();
    for d in dists {
        map.entry(d.source.clone()).or_default().push(d.clone());
    }
    map
}
