//! Bayesian two-change-point model on a novelty series.
//!
//! The series y_0..y_{T-1} is modeled as Gaussian with a shared σ and a
//! segment mean that switches at two continuous change points:
//! mean μ1 for t < τ1, μ2 for τ1 ≤ t < τ2, μ3 for t ≥ τ2. Priors are
//! μ_i ~ N(0, 0.5), σ ~ HalfCauchy(0.5), τ1 uniform over the index range
//! [0, T] and τ2 uniform over (τ1, T], restricted to segmentations that
//! give every segment at least one observation. The posterior is explored by an
//! adaptive Metropolis-within-Gibbs sampler ([`sample_posterior`]); a
//! negative-event signature is declared when the middle segment's mean
//! sits credibly below both neighbors ([`classify_nid`]).

pub mod diag;
mod sampler;

pub use sampler::sample_posterior;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convergence limit on the split R-hat diagnostic.
pub const RHAT_LIMIT: f64 = 1.05;
/// Posterior ordering probability both comparisons must exceed for a
/// positive classification.
pub const NID_THRESHOLD: f64 = 0.97;
/// Default highest-density-interval mass.
pub const HDI_MASS: f64 = 0.94;

/// Model dimensions and prior settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpModelSpec {
    /// Series length T; change points live on [0, T].
    pub t: usize,
    pub mu_prior_mean: f64,
    pub mu_prior_sd: f64,
    pub sigma_prior_scale: f64,
}

impl CpModelSpec {
    /// Standard priors for a series of length `t`. At least six points are
    /// required for three segments to be estimable at all.
    pub fn new(t: usize) -> Result<Self> {
        if t < 6 {
            return Err(Error::config(format!(
                "change-point model needs a series of at least 6 points, got {t}"
            )));
        }
        Ok(Self {
            t,
            mu_prior_mean: 0.0,
            mu_prior_sd: 0.5,
            sigma_prior_scale: 0.5,
        })
    }
}

/// One parameter vector (μ1, μ2, μ3, σ, τ1, τ2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpParams {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub sigma: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// Split R-hat per parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rhat {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub sigma: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl Rhat {
    /// Worst diagnostic across the six parameters.
    pub fn max(&self) -> f64 {
        [
            self.mu1, self.mu2, self.mu3, self.sigma, self.tau1, self.tau2,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sampling-phase Metropolis acceptance rates. The μ block is updated by
/// exact Gibbs draws and has no rejection step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceRates {
    pub sigma: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// Joint posterior draws from all chains, chain-major, plus diagnostics.
#[derive(Clone, Debug)]
pub struct ChangePointPosterior {
    pub samples: Vec<CpParams>,
    pub n_chains: usize,
    pub draws_per_chain: usize,
    pub seed: u64,
    pub rhat: Rhat,
    pub accept: AcceptanceRates,
}

impl ChangePointPosterior {
    /// Whether every parameter's split R-hat is within [`RHAT_LIMIT`].
    pub fn converged(&self) -> bool {
        self.rhat.max() <= RHAT_LIMIT
    }

    /// Extract one scalar coordinate from every sample.
    pub fn column(&self, f: impl Fn(&CpParams) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }
}

/// Prefix sums of y and y², giving O(1) segment statistics.
#[derive(Clone, Debug)]
pub(crate) struct PrefixStats {
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl PrefixStats {
    pub(crate) fn new(y: &[f64]) -> Self {
        let mut s1 = Vec::with_capacity(y.len() + 1);
        let mut s2 = Vec::with_capacity(y.len() + 1);
        s1.push(0.0);
        s2.push(0.0);
        for &v in y {
            s1.push(s1.last().unwrap() + v);
            s2.push(s2.last().unwrap() + v * v);
        }
        Self { s1, s2 }
    }

    /// Count, sum and sum of squares over the index range [a, b).
    pub(crate) fn seg(&self, a: usize, b: usize) -> (f64, f64, f64) {
        debug_assert!(a <= b && b < self.s1.len());
        (
            (b - a) as f64,
            self.s1[b] - self.s1[a],
            self.s2[b] - self.s2[a],
        )
    }
}

/// First index governed by the regime after a change point at `tau`:
/// t < tau holds exactly for t < ceil(tau).
pub(crate) fn cut(tau: f64, t: usize) -> usize {
    (tau.ceil() as usize).min(t)
}

/// Whether a change-point pair describes three non-degenerate segments.
/// The model assumes two change points exist within the window, so every
/// segment must contain at least one observation; without this rule the
/// marginal likelihood rewards empty segments (they dodge their Occam
/// penalty entirely) and a featureless series drives both change points
/// into the final index cell instead of leaving them diffuse. Written
/// with negated comparisons so NaN falls outside the support.
pub(crate) fn taus_in_support(tau1: f64, tau2: f64, t: usize) -> bool {
    if !(tau1 >= 0.0) || !(tau1 < tau2) || !(tau2 <= t as f64) {
        return false;
    }
    let c1 = cut(tau1, t);
    let c2 = cut(tau2, t);
    c1 >= 1 && c2 > c1 && c2 < t
}

fn normal_logpdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * (2.0 * std::f64::consts::PI).ln() - sd.ln() - 0.5 * z * z
}

fn half_cauchy_logpdf(x: f64, scale: f64) -> f64 {
    let r = x / scale;
    (2.0 / (std::f64::consts::PI * scale)).ln() - (1.0 + r * r).ln()
}

/// Joint log-prior; −∞ outside the support (σ ≤ 0, change points out of
/// order, or a segment left empty — see [`taus_in_support`]). Comparisons
/// are written in negated form so NaN parameters also land outside the
/// support.
pub(crate) fn log_prior(p: &CpParams, spec: &CpModelSpec) -> f64 {
    let t = spec.t as f64;
    if !(p.sigma > 0.0)
        || !taus_in_support(p.tau1, p.tau2, spec.t)
        || !p.mu1.is_finite()
        || !p.mu2.is_finite()
        || !p.mu3.is_finite()
        || !p.sigma.is_finite()
    {
        return f64::NEG_INFINITY;
    }
    let mu_prior = normal_logpdf(p.mu1, spec.mu_prior_mean, spec.mu_prior_sd)
        + normal_logpdf(p.mu2, spec.mu_prior_mean, spec.mu_prior_sd)
        + normal_logpdf(p.mu3, spec.mu_prior_mean, spec.mu_prior_sd);
    let sigma_prior = half_cauchy_logpdf(p.sigma, spec.sigma_prior_scale);
    // τ1 ~ U[0, T], τ2 | τ1 ~ U(τ1, T].
    let tau_prior = -t.ln() - (t - p.tau1).ln();
    mu_prior + sigma_prior + tau_prior
}

/// Gaussian log-likelihood of the three segments, from precomputed
/// prefix sums.
pub(crate) fn log_lik(stats: &PrefixStats, spec: &CpModelSpec, p: &CpParams) -> f64 {
    let t = spec.t;
    let c1 = cut(p.tau1, t);
    let c2 = cut(p.tau2, t);
    let sigma2 = p.sigma * p.sigma;
    let ln_norm = 0.5 * (2.0 * std::f64::consts::PI * sigma2).ln();
    let mut ll = 0.0;
    for (a, b, mu) in [(0, c1, p.mu1), (c1, c2, p.mu2), (c2, t, p.mu3)] {
        let (n, sum, sumsq) = stats.seg(a, b);
        ll += -n * ln_norm - (sumsq - 2.0 * mu * sum + n * mu * mu) / (2.0 * sigma2);
    }
    ll
}

pub(crate) fn log_post_inner(stats: &PrefixStats, spec: &CpModelSpec, p: &CpParams) -> f64 {
    let prior = log_prior(p, spec);
    if prior == f64::NEG_INFINITY {
        return prior;
    }
    prior + log_lik(stats, spec, p)
}

/// Unnormalized log posterior density of one parameter vector given the
/// series. Returns −∞ outside the support: σ ≤ 0, change points out of
/// order, or a segmentation that leaves any segment without an
/// observation.
pub fn log_posterior(p: &CpParams, y: &[f64], spec: &CpModelSpec) -> Result<f64> {
    if y.len() != spec.t {
        return Err(Error::DimensionMismatch {
            expected: spec.t,
            got: y.len(),
        });
    }
    if let Some(at) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { at });
    }
    Ok(log_post_inner(&PrefixStats::new(y), spec, p))
}

/// Shortest interval containing ⌈mass·n⌉ of the samples (unimodal HDI
/// convention). Requires at least 50 samples; `mass` may be anything in
/// (0, 1], with 1.0 spanning the full sample range.
pub fn hdi(samples: &[f64], mass: f64) -> Result<(f64, f64)> {
    if samples.len() < 50 {
        return Err(Error::TooFewSamples {
            needed: 50,
            got: samples.len(),
        });
    }
    if !(mass > 0.0 && mass <= 1.0) {
        return Err(Error::config(format!(
            "hdi mass must lie in (0, 1], got {mass}"
        )));
    }
    if let Some(at) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { at });
    }
    let mut s = samples.to_vec();
    s.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    // Small slack before the ceiling so that exact products such as
    // 0.94 × 50 = 47.000000000000007 do not round a sample upward.
    let m = (((mass * n as f64) - 1e-9).ceil() as usize).clamp(1, n);
    let mut best = 0;
    let mut best_width = f64::INFINITY;
    for i in 0..=(n - m) {
        let width = s[i + m - 1] - s[i];
        if width < best_width {
            best_width = width;
            best = i;
        }
    }
    Ok((s[best], s[best + m - 1]))
}

/// Map a change point on the index axis to its calendar date: the date at
/// floor(tau), clamped to the final date.
pub fn tau_to_date(tau: f64, dates: &[NaiveDate]) -> Result<NaiveDate> {
    if dates.is_empty() {
        return Err(Error::config(
            "cannot map a change point onto an empty date axis",
        ));
    }
    if !(tau >= 0.0 && tau <= dates.len() as f64) {
        return Err(Error::config(format!(
            "change point {tau} lies outside the index range [0, {}]",
            dates.len()
        )));
    }
    let idx = (tau.floor() as usize).min(dates.len() - 1);
    Ok(dates[idx])
}

/// A change-point estimate on the date axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    /// Posterior-mean change point, as a date.
    pub date: NaiveDate,
    /// Highest-density interval, as dates.
    pub hdi: [NaiveDate; 2],
}

/// A scalar parameter estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub mean: f64,
    pub hdi: [f64; 2],
}

/// How the verdict was reached, for auditing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    /// Fraction of joint samples with μ2 < μ1.
    pub p_mu2_lt_mu1: f64,
    /// Fraction of joint samples with μ2 < μ3.
    pub p_mu2_lt_mu3: f64,
    /// Threshold both fractions must exceed.
    pub threshold: f64,
    /// Most frequent integer day cell for each change point, as dates.
    pub tau1_mode: NaiveDate,
    pub tau2_mode: NaiveDate,
    pub converged: bool,
    /// Reading of the change-point prior applied by this model.
    pub tau_prior_note: String,
}

/// Per-source verdict: change-point dates with HDIs, segment means, and
/// the NID decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NidReport {
    pub source: String,
    pub tau1: TauEstimate,
    pub tau2: TauEstimate,
    pub mu: [ParamEstimate; 3],
    pub sigma: ParamEstimate,
    pub nid_supported: bool,
    /// Worst split R-hat across parameters.
    pub rhat: f64,
    pub seed: u64,
    pub trace: DecisionTrace,
}

const TAU_PRIOR_NOTE: &str = "change-point priors are uniform over the day-index range \
[0, T], with tau2 restricted to (tau1, T] and segmentations constrained so every \
segment holds at least one observation";

/// Most frequent integer day cell of a set of continuous change points; a
/// sample x falls in cell ceil(x) − 1, the last index of the old regime.
/// The reported date is the first day of the new regime. Ties take the
/// earliest cell.
fn tau_mode_date(samples: &[f64], dates: &[NaiveDate], t: usize) -> Result<NaiveDate> {
    let mut counts = vec![0usize; t];
    for &x in samples {
        let cell = (x.ceil() as isize - 1).clamp(0, t as isize - 1) as usize;
        counts[cell] += 1;
    }
    let mode = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    tau_to_date((mode + 1) as f64, dates)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Apply the decision rule to a posterior: NID is supported when
/// P(μ2 < μ1) and P(μ2 < μ3) both exceed the threshold. Unconverged
/// posteriors are still classified; the trace records the convergence
/// flag. `dates` is the observed date axis the series was built on and
/// `hdi_mass` the interval mass for all reported HDIs.
pub fn classify_nid(
    post: &ChangePointPosterior,
    dates: &[NaiveDate],
    source: impl Into<String>,
    threshold: f64,
    hdi_mass: f64,
) -> Result<NidReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::config(format!(
            "nid threshold must lie strictly between 0 and 1, got {threshold}"
        )));
    }
    if post.samples.is_empty() {
        return Err(Error::TooFewSamples { needed: 50, got: 0 });
    }
    let n = post.samples.len() as f64;
    let p21 = post.samples.iter().filter(|s| s.mu2 < s.mu1).count() as f64 / n;
    let p23 = post.samples.iter().filter(|s| s.mu2 < s.mu3).count() as f64 / n;

    let tau1s = post.column(|s| s.tau1);
    let tau2s = post.column(|s| s.tau2);
    let tau_est = |xs: &[f64]| -> Result<TauEstimate> {
        let (lo, hi) = hdi(xs, hdi_mass)?;
        Ok(TauEstimate {
            date: tau_to_date(mean(xs), dates)?,
            hdi: [tau_to_date(lo, dates)?, tau_to_date(hi, dates)?],
        })
    };
    let param_est = |xs: &[f64]| -> Result<ParamEstimate> {
        let (lo, hi) = hdi(xs, hdi_mass)?;
        Ok(ParamEstimate {
            mean: mean(xs),
            hdi: [lo, hi],
        })
    };

    Ok(NidReport {
        source: source.into(),
        tau1: tau_est(&tau1s)?,
        tau2: tau_est(&tau2s)?,
        mu: [
            param_est(&post.column(|s| s.mu1))?,
            param_est(&post.column(|s| s.mu2))?,
            param_est(&post.column(|s| s.mu3))?,
        ],
        sigma: param_est(&post.column(|s| s.sigma))?,
        nid_supported: p21 > threshold && p23 > threshold,
        rhat: post.rhat.max(),
        seed: post.seed,
        trace: DecisionTrace {
            p_mu2_lt_mu1: p21,
            p_mu2_lt_mu3: p23,
            threshold,
            tau1_mode: tau_mode_date(&tau1s, dates, dates.len())?,
            tau2_mode: tau_mode_date(&tau2s, dates, dates.len())?,
            converged: post.converged(),
            tau_prior_note: TAU_PRIOR_NOTE.to_string(),
        },
    })
}
