//! Adaptive Metropolis-within-Gibbs sampler for the two-change-point
//! model.
//!
//! Each iteration updates the change points, redraws the three segment
//! means exactly from their conjugate normal conditionals, and updates σ
//! by a random walk on the log scale. Change points usually move by a
//! random walk on the raw scale; one sweep in ten instead redraws each of
//! them from its uniform support and judges the jump with the segment
//! means integrated out analytically, so a chain can vault between distant
//! segmentations without its current μ's vetoing the move. Random-walk
//! step sizes adapt toward a 0.44 acceptance rate during warmup only, in
//! batches of 50 proposals, so the retained draws come from a fixed
//! transition kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::diag::split_rhat;
use super::{
    cut, log_post_inner, taus_in_support, AcceptanceRates, ChangePointPosterior, CpModelSpec,
    CpParams, PrefixStats, Rhat,
};
use crate::error::{Error, Result};

/// Fraction of sweeps whose change-point updates are collapsed
/// independence draws.
const TELEPORT_RATE: f64 = 0.1;
/// Proposals per adaptation batch.
const BATCH: u32 = 50;
/// Metropolis target acceptance rate for scalar random walks.
const TARGET_ACCEPT: f64 = 0.44;

/// Draw from the joint posterior. Chains run in parallel, each on its own
/// RNG stream derived from (seed, chain index), so the result is
/// bit-for-bit reproducible regardless of scheduling. Warmup iterations
/// are discarded. The returned posterior carries split R-hat diagnostics;
/// callers should treat values above [`super::RHAT_LIMIT`] as
/// non-convergence, which flags the result rather than discarding it.
pub fn sample_posterior(
    y: &[f64],
    spec: &CpModelSpec,
    chains: usize,
    draws: usize,
    warmup: usize,
    seed: u64,
) -> Result<ChangePointPosterior> {
    if chains < 2 {
        return Err(Error::config(format!(
            "need at least 2 chains for convergence diagnostics, got {chains}"
        )));
    }
    if draws < 1000 {
        return Err(Error::config(format!(
            "need at least 1000 retained draws per chain, got {draws}"
        )));
    }
    if y.len() != spec.t {
        return Err(Error::DimensionMismatch {
            expected: spec.t,
            got: y.len(),
        });
    }
    if let Some(at) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { at });
    }

    let stats = PrefixStats::new(y);
    let outs: Vec<ChainOut> = (0..chains)
        .into_par_iter()
        .map(|c| run_chain(&stats, spec, draws, warmup, seed, c as u64))
        .collect();

    let mut samples = Vec::with_capacity(chains * draws);
    for out in &outs {
        samples.extend_from_slice(&out.samples);
    }
    let per_param = |f: fn(&CpParams) -> f64| -> f64 {
        let data: Vec<Vec<f64>> = outs
            .iter()
            .map(|o| o.samples.iter().map(f).collect())
            .collect();
        split_rhat(&data)
    };
    let rhat = Rhat {
        mu1: per_param(|p| p.mu1),
        mu2: per_param(|p| p.mu2),
        mu3: per_param(|p| p.mu3),
        sigma: per_param(|p| p.sigma),
        tau1: per_param(|p| p.tau1),
        tau2: per_param(|p| p.tau2),
    };
    let mean_rate =
        |f: fn(&ChainOut) -> f64| -> f64 { outs.iter().map(f).sum::<f64>() / outs.len() as f64 };
    Ok(ChangePointPosterior {
        samples,
        n_chains: chains,
        draws_per_chain: draws,
        seed,
        rhat,
        accept: AcceptanceRates {
            sigma: mean_rate(|o| o.accept[0]),
            tau1: mean_rate(|o| o.accept[1]),
            tau2: mean_rate(|o| o.accept[2]),
        },
    })
}

struct ChainOut {
    samples: Vec<CpParams>,
    /// Sampling-phase acceptance rates for (sigma, tau1, tau2).
    accept: [f64; 3],
}

/// Log of the τ prior plus the likelihood with the three segment means
/// integrated out against their conjugate prior — the target of collapsed
/// change-point moves. −∞ outside the support (NaN-safe via negated
/// comparisons).
fn collapsed_lp(stats: &PrefixStats, spec: &CpModelSpec, tau1: f64, tau2: f64, sigma: f64) -> f64 {
    let t = spec.t as f64;
    if !taus_in_support(tau1, tau2, spec.t) {
        return f64::NEG_INFINITY;
    }
    let c1 = cut(tau1, spec.t);
    let c2 = cut(tau2, spec.t);
    let sigma2 = sigma * sigma;
    let s02 = spec.mu_prior_sd * spec.mu_prior_sd;
    let mu0 = spec.mu_prior_mean;
    let ln_norm = 0.5 * (2.0 * std::f64::consts::PI * sigma2).ln();
    let mut lp = -t.ln() - (t - tau1).ln();
    for (a, b) in [(0, c1), (c1, c2), (c2, spec.t)] {
        let (n, sum, sumsq) = stats.seg(a, b);
        // ∫ Π N(y_i | μ, σ²) N(μ | μ0, s0²) dμ in closed form; an empty
        // segment contributes exactly zero.
        let lambda = n / sigma2 + 1.0 / s02;
        let bq = sum / sigma2 + mu0 / s02;
        lp += -n * ln_norm - 0.5 * (s02 * lambda).ln() + bq * bq / (2.0 * lambda)
            - sumsq / (2.0 * sigma2)
            - mu0 * mu0 / (2.0 * s02);
    }
    lp
}

/// Per-component random-walk scale with warmup batch adaptation.
struct StepSize {
    step: f64,
    count: u32,
    accepted: u32,
    batches: u32,
}

impl StepSize {
    fn new(step: f64) -> Self {
        Self {
            step,
            count: 0,
            accepted: 0,
            batches: 0,
        }
    }

    fn record(&mut self, accepted: bool) {
        self.count += 1;
        self.accepted += accepted as u32;
        if self.count == BATCH {
            self.batches += 1;
            let delta = (1.0 / (self.batches as f64).sqrt()).min(0.25);
            let rate = self.accepted as f64 / BATCH as f64;
            let factor = if rate > TARGET_ACCEPT { delta } else { -delta };
            self.step *= factor.exp();
            self.count = 0;
            self.accepted = 0;
        }
    }
}

fn run_chain(
    stats: &PrefixStats,
    spec: &CpModelSpec,
    draws: usize,
    warmup: usize,
    seed: u64,
    chain: u64,
) -> ChainOut {
    let t = spec.t as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    let z = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };

    // Overdispersed start: σ around the data scale, change points a
    // uniform ordered pair from inside the support, means from their
    // prior.
    let (n_all, sum_all, sumsq_all) = stats.seg(0, spec.t);
    let data_mean = sum_all / n_all;
    let data_var = (sumsq_all / n_all - data_mean * data_mean).max(0.0);
    let base_sd = if data_var > 1e-24 {
        data_var.sqrt()
    } else {
        0.1
    };
    let mut p = {
        let sigma = base_sd * (0.5 * z(&mut rng)).exp();
        let (tau1, tau2) = loop {
            let a = rng.gen_range(0.0..t);
            let b = rng.gen_range(0.0..t);
            let (lo, hi) = (a.min(b), a.max(b));
            if taus_in_support(lo, hi, spec.t) {
                break (lo, hi);
            }
        };
        CpParams {
            mu1: spec.mu_prior_mean + spec.mu_prior_sd * z(&mut rng),
            mu2: spec.mu_prior_mean + spec.mu_prior_sd * z(&mut rng),
            mu3: spec.mu_prior_mean + spec.mu_prior_sd * z(&mut rng),
            sigma,
            tau1,
            tau2,
        }
    };

    let mut sigma_step = StepSize::new(0.5);
    let mut tau1_step = StepSize::new(t / 10.0);
    let mut tau2_step = StepSize::new(t / 10.0);
    let prior_prec = 1.0 / (spec.mu_prior_sd * spec.mu_prior_sd);
    let prior_contrib = spec.mu_prior_mean * prior_prec;

    let mut samples = Vec::with_capacity(draws);
    let mut accepts = [0u64; 3];
    for iter in 0..(warmup + draws) {
        let adapting = iter < warmup;

        // Change points first. A teleport sweep redraws each τ from its
        // uniform support and accepts on the collapsed (μ-integrated)
        // posterior; the uniform proposal density cancels in the ratio.
        // The means are re-drawn from their exact conditionals right
        // after, which is what makes the collapsed move a valid update of
        // the joint chain.
        if rng.gen::<f64>() < TELEPORT_RATE {
            let mut cur = collapsed_lp(stats, spec, p.tau1, p.tau2, p.sigma);
            {
                let cand = rng.gen_range(0.0..p.tau2);
                let cand_lp = collapsed_lp(stats, spec, cand, p.tau2, p.sigma);
                let accepted = (rng.gen::<f64>()).ln() < cand_lp - cur;
                if accepted {
                    p.tau1 = cand;
                    cur = cand_lp;
                }
                if !adapting {
                    accepts[1] += accepted as u64;
                }
            }
            {
                let cand = rng.gen_range(p.tau1..t);
                let cand_lp = collapsed_lp(stats, spec, p.tau1, cand, p.sigma);
                let accepted = (rng.gen::<f64>()).ln() < cand_lp - cur;
                if accepted {
                    p.tau2 = cand;
                }
                if !adapting {
                    accepts[2] += accepted as u64;
                }
            }
        } else {
            let mut cur_lp = log_post_inner(stats, spec, &p);
            {
                let cand = CpParams {
                    tau1: p.tau1 + tau1_step.step * z(&mut rng),
                    ..p
                };
                let cand_lp = log_post_inner(stats, spec, &cand);
                let accepted = (rng.gen::<f64>()).ln() < cand_lp - cur_lp;
                if accepted {
                    p = cand;
                    cur_lp = cand_lp;
                }
                if adapting {
                    tau1_step.record(accepted);
                } else {
                    accepts[1] += accepted as u64;
                }
            }
            {
                let cand = CpParams {
                    tau2: p.tau2 + tau2_step.step * z(&mut rng),
                    ..p
                };
                let cand_lp = log_post_inner(stats, spec, &cand);
                let accepted = (rng.gen::<f64>()).ln() < cand_lp - cur_lp;
                if accepted {
                    p = cand;
                }
                if adapting {
                    tau2_step.record(accepted);
                } else {
                    accepts[2] += accepted as u64;
                }
            }
        }

        // Exact Gibbs draws for the segment means under the current
        // segmentation. An empty segment reduces to the prior because
        // n = 0.
        let c1 = cut(p.tau1, spec.t);
        let c2 = cut(p.tau2, spec.t);
        let sigma2 = p.sigma * p.sigma;
        let gibbs = |a: usize, b: usize, rng: &mut ChaCha8Rng| -> f64 {
            let (n, sum, _) = stats.seg(a, b);
            let prec = prior_prec + n / sigma2;
            let mean = (prior_contrib + sum / sigma2) / prec;
            mean + rng.sample::<f64, _>(StandardNormal) / prec.sqrt()
        };
        p.mu1 = gibbs(0, c1, &mut rng);
        p.mu2 = gibbs(c1, c2, &mut rng);
        p.mu3 = gibbs(c2, spec.t, &mut rng);

        // σ: random walk on ln σ; the Jacobian term ln σ′ − ln σ keeps
        // the walk targeting the density in σ.
        {
            let cur_lp = log_post_inner(stats, spec, &p);
            let ls = p.sigma.ln();
            let ls_new = ls + sigma_step.step * z(&mut rng);
            let cand = CpParams {
                sigma: ls_new.exp(),
                ..p
            };
            let cand_lp = log_post_inner(stats, spec, &cand);
            let delta = cand_lp - cur_lp + ls_new - ls;
            let accepted = (rng.gen::<f64>()).ln() < delta;
            if accepted {
                p = cand;
            }
            if adapting {
                sigma_step.record(accepted);
            } else {
                accepts[0] += accepted as u64;
            }
        }

        if !adapting {
            samples.push(p);
        }
    }

    let d = draws as f64;
    ChainOut {
        samples,
        accept: [
            accepts[0] as f64 / d,
            accepts[1] as f64 / d,
            accepts[2] as f64 / d,
        ],
    }
}
