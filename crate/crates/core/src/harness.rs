//! Monte Carlo studies: deviation-quantile benchmarks, truncation/block
//! regime sweeps, contamination scaling, and U-statistic agreement.
//!
//! All studies are paired (every estimator sees the same samples) and
//! bit-reproducible from `(config, master_seed)`: replication seeds derive
//! from the master seed through a counter scheme, so replications could run
//! on independent workers without coordination.

use crate::blocking;
use crate::contamination::{contaminate, ContaminationStrategy};
use crate::distributions::NamedDistribution;
use crate::error::{Error, Result};
use crate::multivariate::estimate_multivariate;
use crate::univariate::{
    estimate_block_huber, estimate_mom, estimate_ustat, robust_sigma, sample_mean,
    EstimatorConfig, UStatMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

/// Quantile levels reported by every deviation study.
pub const QUANTILE_LEVELS: [f64; 4] = [0.5, 0.9, 0.99, 0.999];

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Counter-mode replication seed: two splitmix64 rounds over the master
/// seed and a stream/replication counter.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ stream.wrapping_mul(0xa076_1d64_78bd_642f)) ^ index)
}

/// Empirical quantile at level `p` of an unsorted list (exact, by sorting).
pub fn empirical_quantile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

// ---------------------------------------------------------------------------
// deviation study

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationStudyConfig {
    pub dist: NamedDistribution,
    pub sample_size: usize,
    pub estimator: EstimatorConfig,
    pub replications: usize,
    pub master_seed: u64,
}

impl DeviationStudyConfig {
    pub fn validate(&self) -> Result<()> {
        self.dist.validate()?;
        if self.replications < 100 {
            return Err(Error::Parameter(format!(
                "need at least 100 replications, got {}",
                self.replications
            )));
        }
        if self.sample_size < self.estimator.k {
            return Err(Error::Parameter("sample_size must be >= k".into()));
        }
        Ok(())
    }
}

/// Deviation quantiles of the estimator and its paired baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub study_id: String,
    pub family: String,
    pub sample_size: usize,
    pub config: EstimatorConfig,
    pub replications: usize,
    pub levels: Vec<f64>,
    pub estimator_quantiles: Vec<f64>,
    pub mean_quantiles: Vec<f64>,
    pub mom_quantiles: Vec<f64>,
    /// `q_p(|est - mu|) / (sigma * sqrt(2 ln(1/(1-p)) / N))` per level.
    pub sub_gaussian_ratios: Vec<f64>,
    pub sigma_reference: f64,
    /// True when the family has infinite variance and a robust scale proxy
    /// was used for the ratios.
    pub sigma_flagged: bool,
    pub master_seed: u64,
    pub wall_clock_ms: u128,
}

/// Paired deviations of (block estimator, sample mean, MOM) around the true
/// mean, one triple per replication.
pub fn paired_deviations(cfg: &DeviationStudyConfig) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let mu = cfg.dist.true_mean();
    let mut dev_est = Vec::with_capacity(cfg.replications);
    let mut dev_mean = Vec::with_capacity(cfg.replications);
    let mut dev_mom = Vec::with_capacity(cfg.replications);
    let mut buf = vec![0.0; cfg.sample_size];
    for rep in 0..cfg.replications {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, 0, rep as u64));
        cfg.dist.sample_into(&mut rng, &mut buf);
        let mut est_cfg = cfg.estimator.clone();
        est_cfg.seed = derive_seed(cfg.master_seed, 1, rep as u64);
        dev_est.push((estimate_block_huber(&buf, &est_cfg)?.estimate - mu).abs());
        dev_mean.push((sample_mean(&buf) - mu).abs());
        dev_mom.push((estimate_mom(&buf, est_cfg.k, est_cfg.seed)? - mu).abs());
    }
    Ok((dev_est, dev_mean, dev_mom))
}

pub fn run_deviation_study(cfg: &DeviationStudyConfig) -> Result<DeviationReport> {
    let start = Instant::now();
    let (dev_est, dev_mean, dev_mom) = paired_deviations(cfg)?;

    let (sigma_reference, sigma_flagged) = match cfg.dist.true_sigma() {
        Some(s) => (s, false),
        None => {
            // robust scale proxy from one pilot sample
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, 2, 0));
            let pilot = cfg.dist.sample_vec(&mut rng, cfg.sample_size);
            (robust_sigma(&pilot, cfg.estimator.k, 0)?, true)
        }
    };

    let n_f = cfg.sample_size as f64;
    let quantiles = |vals: &[f64]| -> Vec<f64> {
        QUANTILE_LEVELS.iter().map(|&p| empirical_quantile(vals, p)).collect()
    };
    let estimator_quantiles = quantiles(&dev_est);
    let sub_gaussian_ratios = QUANTILE_LEVELS
        .iter()
        .zip(&estimator_quantiles)
        .map(|(&p, &q)| q / (sigma_reference * (2.0 * (1.0 / (1.0 - p)).ln() / n_f).sqrt()))
        .collect();

    Ok(DeviationReport {
        study_id: "deviation".into(),
        family: cfg.dist.family_name().into(),
        sample_size: cfg.sample_size,
        config: cfg.estimator.clone(),
        replications: cfg.replications,
        levels: QUANTILE_LEVELS.to_vec(),
        estimator_quantiles,
        mean_quantiles: quantiles(&dev_mean),
        mom_quantiles: quantiles(&dev_mom),
        sub_gaussian_ratios,
        sigma_reference,
        sigma_flagged,
        master_seed: cfg.master_seed,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// regime sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSweepConfig {
    pub dist: NamedDistribution,
    pub sample_size: usize,
    pub k_grid: Vec<usize>,
    /// Multipliers applied to the reference scale (the analytic sigma where
    /// finite, a robust estimate otherwise).
    pub delta_multipliers: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCell {
    pub k: usize,
    pub delta_multiplier: f64,
    pub delta: f64,
    pub report: DeviationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSweepReport {
    pub study_id: String,
    pub cells: Vec<RegimeCell>,
    pub sigma_reference: f64,
    pub master_seed: u64,
    pub wall_clock_ms: u128,
}

pub fn run_regime_sweep(cfg: &RegimeSweepConfig) -> Result<RegimeSweepReport> {
    let start = Instant::now();
    cfg.dist.validate()?;
    if cfg.k_grid.is_empty() || cfg.delta_multipliers.is_empty() {
        return Err(Error::Parameter("empty sweep grid".into()));
    }
    let sigma_reference = match cfg.dist.true_sigma() {
        Some(s) => s,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, 2, 0));
            let pilot = cfg.dist.sample_vec(&mut rng, cfg.sample_size);
            robust_sigma(&pilot, *cfg.k_grid.first().unwrap(), 0)?
        }
    };
    let mut cells = Vec::new();
    for &k in &cfg.k_grid {
        for &mult in &cfg.delta_multipliers {
            let delta = sigma_reference * mult;
            let mut est = EstimatorConfig::new(k, delta);
            est.seed = 0;
            let study = DeviationStudyConfig {
                dist: cfg.dist,
                sample_size: cfg.sample_size,
                estimator: est,
                replications: cfg.replications,
                // same seed stream for every cell: the paired design extends
                // across cells
                master_seed: cfg.master_seed,
            };
            let report = run_deviation_study(&study)?;
            cells.push(RegimeCell {
                k,
                delta_multiplier: mult,
                delta,
                report,
            });
        }
    }
    Ok(RegimeSweepReport {
        study_id: "regimes".into(),
        cells,
        sigma_reference,
        master_seed: cfg.master_seed,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// contamination sweep

/// Rule for the per-cell truncation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaRule {
    /// `delta = multiplier * sigma`.
    FixedSigmaMultiple { multiplier: f64 },
    /// `delta = sigma * max(1, sqrt(k_factor * kappa^{2/3} * eps^{1/3}))`,
    /// the truncation level consistent with the block-count rule
    /// `k = k_factor * eps * N` for tail exponent delta = 1.
    CorollaryScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContaminationSweepConfig {
    pub dist: NamedDistribution,
    pub sample_size: usize,
    pub dim: usize,
    pub eps_grid: Vec<f64>,
    /// Block-count rule `k = round(k_factor * eps * N)`.
    pub k_factor: f64,
    pub delta_rule: DeltaRule,
    pub m_directions: usize,
    pub solver_tol: f64,
    /// Adversary menu evaluated per replication (worst-of selection).
    pub strategies: Vec<ContaminationStrategy>,
    /// Magnitude of the point-mass attack for the sample-mean baseline.
    pub baseline_point_mass: f64,
    pub replications: usize,
    pub master_seed: u64,
}

impl ContaminationSweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.dist.validate()?;
        if self.eps_grid.is_empty() || self.strategies.is_empty() {
            return Err(Error::Parameter("empty eps grid or strategy menu".into()));
        }
        let n_f = self.sample_size as f64;
        for &eps in &self.eps_grid {
            if !(eps >= 1.0 / n_f && eps <= 0.2) {
                return Err(Error::Parameter(format!(
                    "eps {eps} outside [1/N, 0.2]"
                )));
            }
            let outliers = (eps * n_f).round() as usize;
            let k = self.block_count(eps);
            if k <= 2 * outliers {
                return Err(Error::Parameter(format!(
                    "k = {k} violates the k > 2*O requirement at eps = {eps} (O = {outliers})"
                )));
            }
        }
        Ok(())
    }

    pub fn block_count(&self, eps: f64) -> usize {
        ((self.k_factor * eps * self.sample_size as f64).round() as usize).max(1)
    }

    fn delta(&self, sigma: f64, kappa: f64, eps: f64) -> f64 {
        match self.delta_rule {
            DeltaRule::FixedSigmaMultiple { multiplier } => sigma * multiplier,
            DeltaRule::CorollaryScaling => {
                sigma * (self.k_factor * kappa.powf(2.0 / 3.0) * eps.powf(1.0 / 3.0))
                    .sqrt()
                    .max(1.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationCell {
    pub eps: f64,
    pub outliers: usize,
    pub k: usize,
    pub delta: f64,
    pub median_error: f64,
    pub baseline_median_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSweepReport {
    pub study_id: String,
    pub cells: Vec<ContaminationCell>,
    /// Least-squares slope of `ln(median_error)` against `ln(eps)`.
    pub fitted_slope: f64,
    pub master_seed: u64,
    pub wall_clock_ms: u128,
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn run_contamination_sweep(cfg: &ContaminationSweepConfig) -> Result<ContaminationSweepReport> {
    let start = Instant::now();
    cfg.validate()?;
    let sigma = cfg
        .dist
        .true_sigma()
        .ok_or_else(|| Error::Parameter("contamination sweep needs finite variance".into()))?;
    let kappa = {
        let moment = cfg.dist.abs_central_moment(1.0, 200_000, cfg.master_seed)?;
        if moment.is_finite() {
            moment / sigma.powi(3)
        } else {
            1.0
        }
    };
    let mu = vec![cfg.dist.true_mean(); cfg.dim];
    let mut cells = Vec::new();
    for (cell_idx, &eps) in cfg.eps_grid.iter().enumerate() {
        let outliers = (eps * cfg.sample_size as f64).round() as usize;
        let k = cfg.block_count(eps);
        let delta = cfg.delta(sigma, kappa, eps);
        let mut errors = Vec::with_capacity(cfg.replications);
        let mut baseline_errors = Vec::with_capacity(cfg.replications);
        for rep in 0..cfg.replications {
            let stream = 10 + cell_idx as u64;
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, stream, rep as u64));
            let clean: Vec<Vec<f64>> = (0..cfg.sample_size)
                .map(|_| (0..cfg.dim).map(|_| cfg.dist.sample(&mut rng)).collect())
                .collect();
            let contamination_seed = derive_seed(cfg.master_seed, stream + 100, rep as u64);

            // worst-of menu for the robust estimator
            let mut worst = 0.0f64;
            for (s_idx, strategy) in cfg.strategies.iter().enumerate() {
                let spec = crate::contamination::ContaminationSpec {
                    count: outliers,
                    strategy: strategy.clone(),
                    seed: contamination_seed.wrapping_add(s_idx as u64),
                };
                let sample = contaminate(&clean, &spec)?;
                let mut est_cfg = EstimatorConfig::new(k, delta);
                est_cfg.seed = derive_seed(cfg.master_seed, stream + 200, rep as u64);
                let sol =
                    estimate_multivariate(&sample.rows, cfg.m_directions, &est_cfg, cfg.solver_tol)?;
                worst = worst.max(l2_distance(&sol.mu_hat, &mu));
            }
            errors.push(worst);

            // paired sample-mean baseline under the point-mass attack
            let spec = crate::contamination::ContaminationSpec {
                count: outliers,
                strategy: ContaminationStrategy::PointMass {
                    value: cfg.baseline_point_mass,
                },
                seed: contamination_seed,
            };
            let sample = contaminate(&clean, &spec)?;
            let d = cfg.dim;
            let mut mean = vec![0.0; d];
            for row in &sample.rows {
                for j in 0..d {
                    mean[j] += row[j];
                }
            }
            for m in &mut mean {
                *m /= sample.rows.len() as f64;
            }
            baseline_errors.push(l2_distance(&mean, &mu));
        }
        cells.push(ContaminationCell {
            eps,
            outliers,
            k,
            delta,
            median_error: empirical_quantile(&errors, 0.5),
            baseline_median_error: empirical_quantile(&baseline_errors, 0.5),
        });
    }
    let xs: Vec<f64> = cells.iter().map(|c| c.eps.ln()).collect();
    let ys: Vec<f64> = cells.iter().map(|c| c.median_error.ln()).collect();
    Ok(ContaminationSweepReport {
        study_id: "contamination".into(),
        fitted_slope: fit_slope(&xs, &ys),
        cells,
        master_seed: cfg.master_seed,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// U-statistic agreement

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UstatAgreementConfig {
    pub dist: NamedDistribution,
    pub sample_size: usize,
    pub subset_size: usize,
    pub delta: f64,
    /// Draw counts for the incomplete (with-replacement) variant.
    pub incomplete_draws: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
}

impl UstatAgreementConfig {
    pub fn validate(&self) -> Result<()> {
        self.dist.validate()?;
        if self.sample_size > 14 || self.subset_size > 4 {
            return Err(Error::Parameter(
                "agreement study is capped at N <= 14, n <= 4 (exact enumeration)".into(),
            ));
        }
        if self.subset_size < 1 || self.subset_size > self.sample_size {
            return Err(Error::Parameter("need 1 <= n <= N".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UstatAgreementReport {
    pub study_id: String,
    pub replications: usize,
    /// `max_rep |exact - dedup_complete|`; must be at numerical zero.
    pub max_exact_dedup_gap: f64,
    /// `max_rep |exact(sample) - exact(permuted sample)|`.
    pub max_permutation_gap: f64,
    /// Median `|ustat - block|` over replications.
    pub median_ustat_block_gap: f64,
    /// Median `|incomplete_B - exact|` per configured draw count.
    pub incomplete_gaps: Vec<(usize, f64)>,
    pub master_seed: u64,
    pub wall_clock_ms: u128,
}

pub fn run_ustat_agreement(cfg: &UstatAgreementConfig) -> Result<UstatAgreementReport> {
    use rand::seq::SliceRandom;
    let start = Instant::now();
    cfg.validate()?;
    let score = crate::score::ScoreFunction::huber();
    let k = cfg.sample_size / cfg.subset_size;
    let mut max_exact_dedup_gap = 0.0f64;
    let mut max_permutation_gap = 0.0f64;
    let mut ustat_block_gaps = Vec::with_capacity(cfg.replications);
    let mut incomplete: Vec<Vec<f64>> = vec![Vec::new(); cfg.incomplete_draws.len()];
    for rep in 0..cfg.replications {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, 0, rep as u64));
        let sample = cfg.dist.sample_vec(&mut rng, cfg.sample_size);
        let seed = derive_seed(cfg.master_seed, 1, rep as u64);
        let exact = estimate_ustat(
            &sample,
            cfg.subset_size,
            UStatMode::Exact,
            cfg.delta,
            score,
            seed,
        )?
        .estimate;
        let dedup = estimate_ustat(
            &sample,
            cfg.subset_size,
            UStatMode::IncompleteDedupComplete,
            cfg.delta,
            score,
            seed,
        )?
        .estimate;
        max_exact_dedup_gap = max_exact_dedup_gap.max((exact - dedup).abs());

        let mut permuted = sample.clone();
        permuted.shuffle(&mut rng);
        let exact_perm = estimate_ustat(
            &permuted,
            cfg.subset_size,
            UStatMode::Exact,
            cfg.delta,
            score,
            seed,
        )?
        .estimate;
        max_permutation_gap = max_permutation_gap.max((exact - exact_perm).abs());

        let mut block_cfg = EstimatorConfig::new(k, cfg.delta).with_seed(seed);
        block_cfg.n = Some(cfg.subset_size);
        let block = estimate_block_huber(&sample, &block_cfg)?.estimate;
        ustat_block_gaps.push((exact - block).abs());

        for (slot, &draws) in incomplete.iter_mut().zip(&cfg.incomplete_draws) {
            let inc = estimate_ustat(
                &sample,
                cfg.subset_size,
                UStatMode::Incomplete { draws },
                cfg.delta,
                score,
                seed,
            )?
            .estimate;
            slot.push((inc - exact).abs());
        }
    }
    Ok(UstatAgreementReport {
        study_id: "ustat".into(),
        replications: cfg.replications,
        max_exact_dedup_gap,
        max_permutation_gap,
        median_ustat_block_gap: empirical_quantile(&ustat_block_gaps, 0.5),
        incomplete_gaps: cfg
            .incomplete_draws
            .iter()
            .copied()
            .zip(incomplete.iter().map(|g| empirical_quantile(g, 0.5)))
            .collect(),
        master_seed: cfg.master_seed,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// CSV emission

/// One row of the stable flat CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub study_id: String,
    pub estimator: String,
    pub family: String,
    pub n_total: usize,
    pub k: usize,
    pub n: usize,
    pub delta: f64,
    pub eps: f64,
    pub level: f64,
    pub quantile: f64,
    /// Always written as 0 to keep the CSV byte-reproducible; wall-clock
    /// timings live in the JSON summaries.
    pub runtime_ms: u64,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "study_id,estimator,family,N,k,n,delta,eps,level,quantile,runtime_ms,seed";

pub fn write_csv<W: Write>(out: &mut W, rows: &[CsvRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.study_id,
            r.estimator,
            r.family,
            r.n_total,
            r.k,
            r.n,
            r.delta,
            r.eps,
            r.level,
            r.quantile,
            r.runtime_ms,
            r.seed
        )?;
    }
    Ok(())
}

fn deviation_rows(report: &DeviationReport, eps: f64) -> Vec<CsvRow> {
    let n = report.config.n.unwrap_or(report.sample_size / report.config.k);
    let mut rows = Vec::new();
    let sets = [
        ("block_huber", &report.estimator_quantiles),
        ("sample_mean", &report.mean_quantiles),
        ("mom", &report.mom_quantiles),
    ];
    for (name, quantiles) in sets {
        for (&level, &q) in report.levels.iter().zip(quantiles.iter()) {
            rows.push(CsvRow {
                study_id: report.study_id.clone(),
                estimator: name.into(),
                family: report.family.clone(),
                n_total: report.sample_size,
                k: report.config.k,
                n,
                delta: report.config.delta,
                eps,
                level,
                quantile: q,
                runtime_ms: 0,
                seed: report.master_seed,
            });
        }
    }
    rows
}

impl DeviationReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        deviation_rows(self, 0.0)
    }
}

impl RegimeSweepReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for cell in &self.cells {
            let mut cell_rows = deviation_rows(&cell.report, 0.0);
            for r in &mut cell_rows {
                r.study_id = self.study_id.clone();
            }
            rows.extend(cell_rows);
        }
        rows
    }
}

impl ContaminationSweepReport {
    pub fn csv_rows(&self, family: &str, n_total: usize) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for cell in &self.cells {
            for (name, value) in [
                ("multivariate_slab", cell.median_error),
                ("sample_mean_baseline", cell.baseline_median_error),
            ] {
                rows.push(CsvRow {
                    study_id: self.study_id.clone(),
                    estimator: name.into(),
                    family: family.into(),
                    n_total,
                    k: cell.k,
                    n: n_total / cell.k,
                    delta: cell.delta,
                    eps: cell.eps,
                    level: 0.5,
                    quantile: value,
                    runtime_ms: 0,
                    seed: self.master_seed,
                });
            }
        }
        rows
    }
}

impl UstatAgreementReport {
    pub fn csv_rows(&self, family: &str, n_total: usize, subset_size: usize, delta: f64) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        let mut push = |estimator: &str, value: f64| {
            rows.push(CsvRow {
                study_id: self.study_id.clone(),
                estimator: estimator.into(),
                family: family.into(),
                n_total,
                k: n_total / subset_size,
                n: subset_size,
                delta,
                eps: 0.0,
                level: 0.5,
                quantile: value,
                runtime_ms: 0,
                seed: self.master_seed,
            });
        };
        push("exact_vs_dedup_max_gap", self.max_exact_dedup_gap);
        push("exact_permutation_max_gap", self.max_permutation_gap);
        push("ustat_vs_block_median_gap", self.median_ustat_block_gap);
        for (draws, gap) in &self.incomplete_gaps {
            push(&format!("incomplete_{draws}_median_gap"), *gap);
        }
        rows
    }
}

pub use blocking::ENUMERATION_CAP;
