//! Adversarial contamination: a clean sample is merged with appended
//! outlier rows and globally shuffled, so a disjoint partition spreads the
//! outliers randomly across blocks. Estimators never see outlier labels;
//! the returned index set is for diagnostics only.

use crate::error::{Error, Result};
use crate::univariate::{estimate_block_huber, estimate_mom, EstimatorConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Outlier generation strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum ContaminationStrategy {
    /// Every outlier equals `value` in each coordinate.
    PointMass { value: f64 },
    /// Outliers at `pilot + magnitude * direction`, where `pilot` is the
    /// coordinatewise median-of-means of the clean sample.
    DirectionalShift { magnitude: f64, direction: Vec<f64> },
    /// Outliers at `pilot + offset` in each coordinate.
    ClusterAtEstimatePlus { offset: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    /// Number of appended outliers; must stay below the clean sample size.
    pub count: usize,
    #[serde(flatten)]
    pub strategy: ContaminationStrategy,
    pub seed: u64,
}

/// Contaminated dataset plus the true outlier positions (diagnostics only).
#[derive(Debug, Clone, PartialEq)]
pub struct ContaminatedSample {
    pub rows: Vec<Vec<f64>>,
    pub outlier_indices: Vec<usize>,
}

fn pilot_estimate(clean: &[Vec<f64>], count: usize, seed: u64) -> Result<Vec<f64>> {
    let d = clean[0].len();
    let k = (2 * count + 1).clamp(1, clean.len());
    let mut pilot = Vec::with_capacity(d);
    let mut column = vec![0.0; clean.len()];
    for j in 0..d {
        for (slot, row) in column.iter_mut().zip(clean) {
            *slot = row[j];
        }
        pilot.push(estimate_mom(&column, k, seed)?);
    }
    Ok(pilot)
}

/// Append `spec.count` adversarial rows to the clean sample and shuffle.
pub fn contaminate(clean: &[Vec<f64>], spec: &ContaminationSpec) -> Result<ContaminatedSample> {
    if clean.is_empty() {
        return Err(Error::Parameter("clean sample must be nonempty".into()));
    }
    let d = clean[0].len();
    if clean.iter().any(|r| r.len() != d) {
        return Err(Error::Consistency("ragged clean sample".into()));
    }
    if spec.count >= clean.len() {
        return Err(Error::Parameter(format!(
            "outlier count {} must be below the clean sample size {}",
            spec.count,
            clean.len()
        )));
    }
    let outlier_row: Vec<f64> = match &spec.strategy {
        ContaminationStrategy::PointMass { value } => vec![*value; d],
        ContaminationStrategy::DirectionalShift {
            magnitude,
            direction,
        } => {
            if direction.len() != d {
                return Err(Error::Parameter(
                    "shift direction dimension mismatch".into(),
                ));
            }
            let pilot = pilot_estimate(clean, spec.count, spec.seed)?;
            pilot
                .iter()
                .zip(direction)
                .map(|(p, u)| p + magnitude * u)
                .collect()
        }
        ContaminationStrategy::ClusterAtEstimatePlus { offset } => {
            let pilot = pilot_estimate(clean, spec.count, spec.seed)?;
            pilot.iter().map(|p| p + offset).collect()
        }
    };

    let total = clean.len() + spec.count;
    let mut order: Vec<usize> = (0..total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);

    let mut rows = Vec::with_capacity(total);
    let mut outlier_indices = Vec::with_capacity(spec.count);
    for (pos, &src) in order.iter().enumerate() {
        if src < clean.len() {
            rows.push(clean[src].clone());
        } else {
            rows.push(outlier_row.clone());
            outlier_indices.push(pos);
        }
    }
    Ok(ContaminatedSample {
        rows,
        outlier_indices,
    })
}

/// Scalar convenience wrapper around [`contaminate`].
pub fn contaminate_scalar(clean: &[f64], spec: &ContaminationSpec) -> Result<(Vec<f64>, Vec<usize>)> {
    let rows: Vec<Vec<f64>> = clean.iter().map(|&x| vec![x]).collect();
    let out = contaminate(&rows, spec)?;
    Ok((
        out.rows.into_iter().map(|r| r[0]).collect(),
        out.outlier_indices,
    ))
}

/// Evaluate the target estimator under each spec and return the most
/// damaging one together with its damage `|estimate - true_mean|`.
pub fn adaptive_worst_of(
    clean: &[f64],
    specs: &[ContaminationSpec],
    target: &EstimatorConfig,
    true_mean: f64,
) -> Result<(ContaminationSpec, f64)> {
    if specs.is_empty() {
        return Err(Error::Parameter("strategy menu must be nonempty".into()));
    }
    let mut worst: Option<(ContaminationSpec, f64)> = None;
    for spec in specs {
        let (sample, _) = contaminate_scalar(clean, spec)?;
        let estimate = estimate_block_huber(&sample, target)?.estimate;
        let damage = (estimate - true_mean).abs();
        if worst.as_ref().map_or(true, |(_, best)| damage > *best) {
            worst = Some((spec.clone(), damage));
        }
    }
    Ok(worst.expect("nonempty menu"))
}
