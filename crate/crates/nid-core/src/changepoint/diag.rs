//! Convergence diagnostics.

/// Split R-hat for one scalar parameter: every chain is cut in half and
/// the pooled-to-within variance ratio is computed across the sub-chains,
/// so a trend inside a single chain also registers. Values near 1 indicate
/// the chains agree; 1.0 is returned when there is no variance anywhere to
/// compare, and +∞ when chains are internally constant but disagree.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let half = chains.iter().map(|c| c.len() / 2).min().unwrap_or(0);
    if half < 2 {
        return 1.0;
    }
    let mut subs: Vec<&[f64]> = Vec::with_capacity(chains.len() * 2);
    for c in chains {
        subs.push(&c[..half]);
        subs.push(&c[c.len() - half..]);
    }
    let m = subs.len() as f64;
    let n = half as f64;
    let means: Vec<f64> = subs.iter().map(|s| mean(s)).collect();
    let grand = mean(&means);
    let b = n / (m - 1.0)
        * means
            .iter()
            .map(|mu| (mu - grand) * (mu - grand))
            .sum::<f64>();
    let w = subs.iter().map(|s| sample_var(s)).sum::<f64>() / m;
    if w == 0.0 {
        return if b == 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var_plus = (n - 1.0) / n * w + b / n;
    (var_plus / w).sqrt()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
