//! Cross-checks the change-point log posterior against an independent
//! transcription of the density: library distribution objects, a
//! per-observation loop with direct float comparisons against the change
//! points, and no shared code with the prefix-sum implementation.

use nid_core::changepoint::{log_posterior, CpModelSpec, CpParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Cauchy, Continuous, Normal};

fn oracle(p: &CpParams, y: &[f64], spec: &CpModelSpec) -> f64 {
    let t = spec.t as f64;
    if !(p.sigma > 0.0 && p.tau1 >= 0.0 && p.tau1 < p.tau2 && p.tau2 <= t) {
        return f64::NEG_INFINITY;
    }
    // Classify every observation by direct comparison against the change
    // points; the density is only defined when all three segments end up
    // with at least one member.
    let seg_of = |i: usize| {
        if (i as f64) < p.tau1 {
            0
        } else if (i as f64) < p.tau2 {
            1
        } else {
            2
        }
    };
    let mut counts = [0usize; 3];
    for i in 0..y.len() {
        counts[seg_of(i)] += 1;
    }
    if counts.contains(&0) {
        return f64::NEG_INFINITY;
    }
    let mu_prior = Normal::new(spec.mu_prior_mean, spec.mu_prior_sd).unwrap();
    let mut lp = mu_prior.ln_pdf(p.mu1) + mu_prior.ln_pdf(p.mu2) + mu_prior.ln_pdf(p.mu3);
    // Half-Cauchy is twice the Cauchy density on the positive axis.
    lp += Cauchy::new(0.0, spec.sigma_prior_scale)
        .unwrap()
        .ln_pdf(p.sigma)
        + 2f64.ln();
    lp += -t.ln() - (t - p.tau1).ln();
    for (i, &v) in y.iter().enumerate() {
        let mu = [p.mu1, p.mu2, p.mu3][seg_of(i)];
        lp += Normal::new(mu, p.sigma).unwrap().ln_pdf(v);
    }
    lp
}

#[test]
fn log_posterior_agrees_with_the_independent_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_301);
    for case in 0..100 {
        let t = rng.gen_range(6..=80usize);
        let spec = CpModelSpec::new(t).unwrap();
        let y: Vec<f64> = (0..t).map(|_| rng.gen_range(-0.5..1.0)).collect();
        let tf = t as f64;
        let mut tau1 = rng.gen_range(0.0..tf - 0.02);
        let mut tau2 = rng.gen_range(tau1 + 0.01..tf);
        // A third of the cases sit exactly on integer boundaries, where
        // the segment-membership rule is easiest to get wrong, and some
        // deliberately leave a segment empty to probe the support edge.
        if case % 3 == 0 {
            tau1 = tau1.floor();
            tau2 = tau2.ceil().min(tf);
            if tau2 <= tau1 {
                tau2 = tau1 + 1.0;
            }
        }
        if case % 7 == 0 {
            tau2 = tf;
        }
        if case % 11 == 0 {
            tau1 = 0.0;
        }
        if case % 13 == 0 {
            tau1 = 2.2;
            tau2 = 2.8;
        }
        let p = CpParams {
            mu1: rng.gen_range(-1.0..1.5),
            mu2: rng.gen_range(-1.0..1.5),
            mu3: rng.gen_range(-1.0..1.5),
            sigma: rng.gen_range(0.05..2.0),
            tau1,
            tau2,
        };
        let got = log_posterior(&p, &y, &spec).unwrap();
        let want = oracle(&p, &y, &spec);
        if got == f64::NEG_INFINITY || want == f64::NEG_INFINITY {
            assert!(
                got == want,
                "case {case}: support disagreement at tau=({tau1}, {tau2}): {got} vs {want}"
            );
        } else {
            assert!(
                (got - want).abs() <= 1e-9,
                "case {case}: {got} vs {want} (diff {})",
                (got - want).abs()
            );
        }
    }
}
