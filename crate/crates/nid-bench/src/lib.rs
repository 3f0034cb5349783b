//! Shared helpers for the pipeline benchmarks.

use chrono::NaiveDate;
use nid_core::DocDistribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random points on the probability simplex, one per consecutive day,
/// for benchmarking the divergence and signal kernels on realistic
/// inputs.
pub fn random_distributions(n: usize, dim: usize, seed: u64) -> Vec<DocDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2019, 12, 1).unwrap();
    (0..n)
        .map(|i| {
            let mut p: Vec<f64> = (0..dim).map(|_| rng.gen_range(1e-6..1.0)).collect();
            let total: f64 = p.iter().sum();
            for v in &mut p {
                *v /= total;
            }
            let date = start + chrono::Duration::days(i as i64);
            DocDistribution::new(format!("bench-{i:05}"), date, "bench", p)
                .expect("valid simplex point")
        })
        .collect()
}
