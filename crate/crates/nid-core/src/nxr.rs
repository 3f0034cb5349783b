//! Linear coupling of resonance to novelty.
//!
//! Within a period, resonance is regressed on novelty by ordinary least
//! squares: R_i = β0 + β1·N_i + ε_i. A depressed β1 during a candidate
//! event window, relative to the windows before and after, is the
//! decoupling pattern the detector looks for.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::infodyn::SignalSeries;

/// An OLS fit of resonance on novelty with a t-interval for the slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Period label: `pre`, `nid` or `post` from [`period_slopes`], `all`
    /// for a bare fit.
    pub period: String,
    /// Earliest date among the fitted points, when known.
    pub start: Option<NaiveDate>,
    /// Latest date among the fitted points, when known.
    pub end: Option<NaiveDate>,
    pub beta0: f64,
    pub beta1: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

/// Ordinary least squares of resonance (second component) on novelty
/// (first component), with a (1−alpha) t-interval on the slope using n−2
/// degrees of freedom.
pub fn fit_slope(points: &[(f64, f64)], alpha: f64) -> Result<SlopeFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!(
            "alpha must lie strictly between 0 and 1, got {alpha}"
        )));
    }
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    for (i, &(x, y)) in points.iter().enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite { at: i });
        }
    }
    // Exact equality, not a variance threshold: float wobble in the mean
    // can make the centered sum of squares tiny but nonzero for constant
    // input.
    if points.iter().all(|&(x, _)| x == points[0].0) {
        return Err(Error::NoveltyConstant);
    }

    let nf = n as f64;
    let xbar = points.iter().map(|&(x, _)| x).sum::<f64>() / nf;
    let ybar = points.iter().map(|&(_, y)| y).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    if sxx == 0.0 {
        return Err(Error::NoveltyConstant);
    }
    let beta1 = sxy / sxx;
    let beta0 = ybar - beta1 * xbar;
    let sse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let e = y - beta0 - beta1 * x;
            e * e
        })
        .sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map_err(|e| Error::config(format!("t-distribution setup failed: {e}")))?
        .inverse_cdf(1.0 - alpha / 2.0);
    Ok(SlopeFit {
        period: "all".into(),
        start: None,
        end: None,
        beta0,
        beta1,
        ci_low: beta1 - t * se,
        ci_high: beta1 + t * se,
        n,
    })
}

/// Fit the three-period decomposition around a candidate event: `pre`
/// (dates before `tau1`), `nid` (`tau1` inclusive to `tau2` exclusive) and
/// `post` (`tau2` onward). Only points with defined novelty and resonance
/// participate; each period needs at least three. The recorded bounds are
/// the observed date extremes of the points actually fitted.
pub fn period_slopes(
    series: &SignalSeries,
    tau1: NaiveDate,
    tau2: NaiveDate,
    alpha: f64,
) -> Result<[SlopeFit; 3]> {
    if tau1 >= tau2 {
        return Err(Error::config(format!(
            "period boundaries must satisfy tau1 < tau2, got {tau1} and {tau2}"
        )));
    }
    let mut buckets: [Vec<(NaiveDate, f64, f64)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for p in &series.points {
        if let (Some(nv), Some(rs)) = (p.novelty, p.resonance) {
            let idx = if p.date < tau1 {
                0
            } else if p.date < tau2 {
                1
            } else {
                2
            };
            buckets[idx].push((p.date, nv, rs));
        }
    }
    let fit_period = |label: &str, bucket: &[(NaiveDate, f64, f64)]| -> Result<SlopeFit> {
        if bucket.len() < 3 {
            return Err(Error::PeriodTooSmall {
                period: label.to_string(),
                got: bucket.len(),
            });
        }
        let pts: Vec<(f64, f64)> = bucket.iter().map(|&(_, x, y)| (x, y)).collect();
        let mut fit = fit_slope(&pts, alpha)?;
        fit.period = label.to_string();
        fit.start = bucket.iter().map(|b| b.0).min();
        fit.end = bucket.iter().map(|b| b.0).max();
        Ok(fit)
    };
    Ok([
        fit_period("pre", &buckets[0])?,
        fit_period("nid", &buckets[1])?,
        fit_period("post", &buckets[2])?,
    ])
}
