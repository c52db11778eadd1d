//! Shared helpers for the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic pseudo-heavy-tailed scalar sample (Student-t with 3
/// degrees of freedom).
pub fn t3_sample(size: usize, seed: u64) -> Vec<f64> {
    let dist = blockmean::NamedDistribution::student_t(3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dist.sample_vec(&mut rng, size)
}

/// Deterministic Gaussian rows for the multivariate benchmarks.
pub fn gaussian_rows(size: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let dist = blockmean::NamedDistribution::standard_normal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| dist.sample_vec(&mut rng, dim))
        .collect()
}
