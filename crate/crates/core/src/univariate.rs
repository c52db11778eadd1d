//! Scalar robust mean estimators: the block-score root estimator, its
//! U-statistic variant, and median-of-means / Catoni-limit / sample-mean
//! baselines.
//!
//! The block estimator is computed as the root of the nonincreasing score
//! curve
//!
//! ```text
//! z -> (1 / sqrt(k)) * sum_j psi( sqrt(n) * (block_mean_j - z) / delta )
//! ```
//!
//! which coincides with the argmin of the summed losses by convexity.
//! Bisection on the guaranteed sign-changing bracket
//! `[min_j mean_j - delta/sqrt(n), max_j mean_j + delta/sqrt(n)]` converges
//! unconditionally; when the zero set is an interval (all scores saturated)
//! the midpoint is returned.

use crate::blocking::{
    self, block_means, enumerate_subsets, partition_disjoint, partition_disjoint_sized,
    sample_subsets, BlockMeans, BlockScheme, SubsetSamplingMode,
};
use crate::error::{Error, Result};
use crate::score::ScoreFunction;
use serde::{Deserialize, Serialize};

/// Everything needed to reproduce a block estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Number of blocks.
    pub k: usize,
    /// Block size; derived as `floor(N/k)` when unset.
    pub n: Option<usize>,
    /// Truncation / scale parameter, in data units.
    pub delta: f64,
    pub score: ScoreFunction,
    /// Absolute bracket-width tolerance for the root solve, in data units.
    pub root_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl EstimatorConfig {
    pub fn new(k: usize, delta: f64) -> Self {
        EstimatorConfig {
            k,
            n: None,
            delta,
            score: ScoreFunction::huber(),
            root_tol: 1e-10,
            max_iter: 200,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_score(mut self, score: ScoreFunction) -> Self {
        self.score = score;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Parameter(format!(
                "delta must be positive and finite, got {}",
                self.delta
            )));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::Parameter("root_tol must be positive".into()));
        }
        if self.k < 1 {
            return Err(Error::Parameter("k must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a root-based estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimate: f64,
    pub iterations: usize,
    pub bracket_width: f64,
    /// False when `max_iter` was reached before the tolerance (flag, not failure).
    pub converged: bool,
    pub scheme_digest: String,
    pub config: EstimatorConfig,
}

/// Evaluate the normalized score curve at `z`.
pub fn score_curve(z: f64, bm: &BlockMeans, cfg: &EstimatorConfig) -> Result<f64> {
    if bm.values.is_empty() {
        return Err(Error::Parameter("block means must be nonempty".into()));
    }
    cfg.validate()?;
    Ok(score_sum(z, &bm.values, bm.n, cfg.delta, &cfg.score) / (bm.values.len() as f64).sqrt())
}

#[inline]
fn score_sum(z: f64, means: &[f64], n: usize, delta: f64, score: &ScoreFunction) -> f64 {
    let scale = (n as f64).sqrt() / delta;
    means.iter().map(|&m| score.psi(scale * (m - z))).sum()
}

struct RootOutcome {
    root: f64,
    iterations: usize,
    bracket_width: f64,
    converged: bool,
}

/// Root of a nonincreasing score sum via double bisection: the leftmost and
/// rightmost sign changes are located separately and the midpoint of the zero
/// interval is returned.
fn bisect_score_root(
    means: &[f64],
    n: usize,
    delta: f64,
    score: &ScoreFunction,
    root_tol: f64,
    max_iter: usize,
) -> Result<RootOutcome> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &m in means {
        lo = lo.min(m);
        hi = hi.max(m);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Numeric(
            "non-finite block means; cannot bracket the score root".into(),
        ));
    }
    let margin = delta / (n as f64).sqrt();
    let lo = lo - margin;
    let hi = hi + margin;
    let g = |z: f64| score_sum(z, means, n, delta, score);

    // leftmost z with g(z) <= 0
    let (mut ll, mut lh) = (lo, hi);
    // rightmost z with g(z) >= 0
    let (mut rl, mut rh) = (lo, hi);
    let mut iterations = 0;
    let mut converged = true;
    while lh - ll > root_tol || rh - rl > root_tol {
        if iterations >= max_iter {
            converged = false;
            break;
        }
        if lh - ll > root_tol {
            let mid = 0.5 * (ll + lh);
            if g(mid) <= 0.0 {
                lh = mid;
            } else {
                ll = mid;
            }
        }
        if rh - rl > root_tol {
            let mid = 0.5 * (rl + rh);
            if g(mid) >= 0.0 {
                rl = mid;
            } else {
                rh = mid;
            }
        }
        iterations += 1;
    }
    let left = 0.5 * (ll + lh);
    let right = 0.5 * (rl + rh);
    Ok(RootOutcome {
        root: 0.5 * (left + right),
        iterations,
        bracket_width: (lh - ll).max(rh - rl),
        converged,
    })
}

fn check_finite(sample: &[f64]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::Parameter("sample must be nonempty".into()));
    }
    if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
        return Err(Error::Numeric(format!("non-finite sample value {x}")));
    }
    Ok(())
}

/// Block-score estimator on a freshly drawn disjoint partition.
pub fn estimate_block_huber(sample: &[f64], cfg: &EstimatorConfig) -> Result<EstimateResult> {
    cfg.validate()?;
    check_finite(sample)?;
    let scheme = match cfg.n {
        Some(n) => partition_disjoint_sized(sample.len(), cfg.k, n, cfg.seed)?,
        None => partition_disjoint(sample.len(), cfg.k, cfg.seed)?,
    };
    estimate_with_scheme(sample, &scheme, cfg)
}

/// Block-score estimator on a caller-provided scheme (shared partitions
/// across directions use this).
pub fn estimate_with_scheme(
    sample: &[f64],
    scheme: &BlockScheme,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    cfg.validate()?;
    check_finite(sample)?;
    let bm = block_means(sample, scheme)?;
    let out = bisect_score_root(
        &bm.values,
        bm.n,
        cfg.delta,
        &cfg.score,
        cfg.root_tol,
        cfg.max_iter,
    )?;
    Ok(EstimateResult {
        estimate: out.root,
        iterations: out.iterations,
        bracket_width: out.bracket_width,
        converged: out.converged,
        scheme_digest: scheme.digest(),
        config: cfg.clone(),
    })
}

/// Catoni-limit estimator: every observation is its own block (`n = 1`,
/// `k = N`). Definitional alias for [`estimate_block_huber`].
pub fn estimate_catoni_limit(
    sample: &[f64],
    delta: f64,
    score: ScoreFunction,
) -> Result<EstimateResult> {
    let mut cfg = EstimatorConfig::new(sample.len(), delta).with_score(score);
    cfg.n = Some(1);
    estimate_block_huber(sample, &cfg)
}

/// Median with the even-length convention: mean of the two central order
/// statistics.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Parameter("median of empty slice".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sorted.len();
    Ok(if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    })
}

/// Median-of-means baseline over `k` disjoint blocks.
pub fn estimate_mom(sample: &[f64], k: usize, seed: u64) -> Result<f64> {
    check_finite(sample)?;
    let scheme = partition_disjoint(sample.len(), k, seed)?;
    let bm = block_means(sample, &scheme)?;
    median(&bm.values)
}

/// Subset scheme used by the U-statistic estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UStatMode {
    /// Average over all `C(N, n)` subsets (capacity-capped).
    Exact,
    /// Average over `B` uniformly sampled subsets (with replacement).
    Incomplete { draws: usize },
    /// Sample until every distinct subset was seen; oracle mode for tiny N.
    IncompleteDedupComplete,
}

/// Permutation-invariant U-statistic estimator: root of the average score
/// over the subset family.
pub fn estimate_ustat(
    sample: &[f64],
    n: usize,
    mode: UStatMode,
    delta: f64,
    score: ScoreFunction,
    seed: u64,
) -> Result<EstimateResult> {
    check_finite(sample)?;
    let scheme = match mode {
        UStatMode::Exact => enumerate_subsets(sample.len(), n)?,
        UStatMode::Incomplete { draws } => sample_subsets(
            sample.len(),
            n,
            draws,
            seed,
            SubsetSamplingMode::WithReplacement,
        )?,
        UStatMode::IncompleteDedupComplete => sample_subsets(
            sample.len(),
            n,
            1,
            seed,
            SubsetSamplingMode::DedupUntilComplete,
        )?,
    };
    let k = scheme.k_effective();
    let mut cfg = EstimatorConfig::new(k, delta).with_score(score).with_seed(seed);
    cfg.n = Some(n);
    estimate_with_scheme(sample, &scheme, &cfg)
}

/// The sample mean, as the non-robust baseline.
pub fn sample_mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

/// Regimes for the default choice of the truncation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaRegime {
    /// `delta = sigma_hat` (large blocks, median-of-means flavor).
    MomLike,
    /// `delta = sigma_hat * sqrt(N)` (single-observation blocks).
    CatoniLike,
    /// `delta = sigma_hat * sqrt(k / s)` for confidence parameter `s`.
    Confidence(f64),
}

/// Robust scale: `1.4826 * MAD` about the median-of-means estimate. The
/// constant makes it consistent for the normal distribution.
pub fn robust_sigma(sample: &[f64], k: usize, seed: u64) -> Result<f64> {
    let center = estimate_mom(sample, k, seed)?;
    let deviations: Vec<f64> = sample.iter().map(|x| (x - center).abs()).collect();
    Ok(1.4826 * median(&deviations)?)
}

/// Default truncation parameter for a regime, from the robust scale of the
/// sample.
pub fn default_delta(sample: &[f64], k: usize, regime: DeltaRegime, seed: u64) -> Result<f64> {
    let sigma = robust_sigma(sample, k, seed)?;
    let scale = match regime {
        DeltaRegime::MomLike => 1.0,
        DeltaRegime::CatoniLike => (sample.len() as f64).sqrt(),
        DeltaRegime::Confidence(s) => {
            if !(s > 0.0) {
                return Err(Error::Parameter(format!(
                    "confidence parameter s must be positive, got {s}"
                )));
            }
            (k as f64 / s).sqrt()
        }
    };
    Ok(sigma * scale)
}

/// Grand mean of the block means (equals the sample mean when `N = n * k`).
pub fn grand_block_mean(sample: &[f64], cfg: &EstimatorConfig) -> Result<f64> {
    let scheme = match cfg.n {
        Some(n) => partition_disjoint_sized(sample.len(), cfg.k, n, cfg.seed)?,
        None => partition_disjoint(sample.len(), cfg.k, cfg.seed)?,
    };
    let bm = block_means(sample, &scheme)?;
    Ok(sample_mean(&bm.values))
}

pub use blocking::ENUMERATION_CAP;
