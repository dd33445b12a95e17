//! Seeded Monte-Carlo sampling of terraces.
//!
//! Draws use ChaCha8 seeded from a `u64`, so a seed reproduces the same
//! sample on every platform.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::epd::Epd1;
use crate::error::{KopulaError, Result};
use crate::lattice::SubsetIndex;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSummary {
    pub n_events: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub frequency_std_errors: Vec<f64>,
    pub marginals: Vec<f64>,
    pub marginal_std_errors: Vec<f64>,
}

fn std_error(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Draws `n_samples` terraces and summarizes frequencies and marginals with
/// binomial standard errors.
pub fn sample_epd(d: &Epd1<f64>, n_samples: u64, seed: u64) -> Result<SampleSummary> {
    if n_samples == 0 {
        return Err(KopulaError::Argument("number of samples must be positive".into()));
    }
    let dist = WeightedIndex::new(d.values())
        .map_err(|e| KopulaError::Argument(format!("cannot sample distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; d.values().len()];
    for _ in 0..n_samples {
        counts[dist.sample(&mut rng)] += 1;
    }
    let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / n_samples as f64).collect();
    let marginals: Vec<f64> = (0..d.n())
        .map(|k| {
            let hits: u64 = counts
                .iter()
                .enumerate()
                .filter(|(x, _)| SubsetIndex(*x as u32).contains(k))
                .map(|(_, &c)| c)
                .sum();
            hits as f64 / n_samples as f64
        })
        .collect();
    Ok(SampleSummary {
        n_events: d.n(),
        n_samples,
        seed,
        rng: "ChaCha8",
        frequency_std_errors: frequencies.iter().map(|&p| std_error(p, n_samples)).collect(),
        marginal_std_errors: marginals.iter().map(|&p| std_error(p, n_samples)).collect(),
        counts,
        frequencies,
        marginals,
    })
}
