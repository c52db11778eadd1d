//! Multivariate robust mean estimation by intersecting directional slabs.
//!
//! Each unit direction `v` gets a univariate robust estimate of the
//! projection of the mean; the slab `S_v(eps)` collects points whose
//! projection onto `v` is within `eps` of that estimate. The estimator is a
//! point in the intersection of all slabs at the smallest feasible `eps`,
//! found by minimizing the convex piecewise-linear function
//! `y -> max_i |<y, v_i> - theta_i|` over a finite direction set.

use crate::blocking::{partition_disjoint, BlockScheme};
use crate::error::{Error, Result};
use crate::univariate::{estimate_mom, estimate_with_scheme, EstimatorConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionKind {
    Basis,
    RandomSphere { m: usize },
    User,
}

/// A finite set of unit directions standing in for the continuum unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    pub vectors: Vec<Vec<f64>>,
    pub kind: DirectionKind,
    pub seed: u64,
}

impl DirectionSet {
    /// The standard basis `e_1 .. e_d`.
    pub fn basis(d: usize) -> Self {
        let vectors = (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                v
            })
            .collect();
        DirectionSet {
            vectors,
            kind: DirectionKind::Basis,
            seed: 0,
        }
    }

    /// `m` directions drawn uniformly on the unit sphere (seeded).
    pub fn random_sphere(d: usize, m: usize, seed: u64) -> Result<Self> {
        if d < 1 || m < 1 {
            return Err(Error::Parameter("need d >= 1 and m >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vectors = Vec::with_capacity(m);
        while vectors.len() < m {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                vectors.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        Ok(DirectionSet {
            vectors,
            kind: DirectionKind::RandomSphere { m },
            seed,
        })
    }

    /// User-supplied directions; each must have unit Euclidean norm.
    pub fn user(vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Parameter("direction set must be nonempty".into()));
        }
        let d = vectors[0].len();
        for v in &vectors {
            if v.len() != d {
                return Err(Error::Consistency("direction dimensions differ".into()));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Parameter(format!(
                    "direction norm {norm} is not 1 within 1e-12"
                )));
            }
        }
        Ok(DirectionSet {
            vectors,
            kind: DirectionKind::User,
            seed: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    /// Concatenate two direction sets over the same dimension.
    pub fn union(mut self, other: DirectionSet) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Consistency("direction dimensions differ".into()));
        }
        self.vectors.extend(other.vectors);
        self.kind = DirectionKind::User;
        Ok(self)
    }
}

/// Per-direction univariate robust estimates, all computed from one shared
/// block partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalEstimates {
    pub directions: DirectionSet,
    pub theta: Vec<f64>,
    pub config: EstimatorConfig,
}

/// Result of the slab-intersection solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabSolution {
    pub mu_hat: Vec<f64>,
    pub eps_star: f64,
    pub solver_iterations: usize,
    /// Estimated optimality gap (flagged, not failed, when the iteration cap
    /// was reached before the target tolerance).
    pub residual_gap: f64,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Project each row onto every direction and run the block estimator with
/// the same partition across directions.
pub fn directional_estimates(
    data: &[Vec<f64>],
    dirs: &DirectionSet,
    cfg: &EstimatorConfig,
) -> Result<DirectionalEstimates> {
    if data.is_empty() {
        return Err(Error::Parameter("data must be nonempty".into()));
    }
    let d = data[0].len();
    if d < 1 || dirs.dim() != d {
        return Err(Error::Parameter(format!(
            "direction dimension {} does not match data dimension {d}",
            dirs.dim()
        )));
    }
    if data.iter().any(|row| row.len() != d) {
        return Err(Error::Consistency("ragged data matrix".into()));
    }
    let scheme: BlockScheme = match cfg.n {
        Some(n) => crate::blocking::partition_disjoint_sized(data.len(), cfg.k, n, cfg.seed)?,
        None => partition_disjoint(data.len(), cfg.k, cfg.seed)?,
    };
    let mut theta = Vec::with_capacity(dirs.vectors.len());
    let mut projected = vec![0.0; data.len()];
    for v in &dirs.vectors {
        for (slot, row) in projected.iter_mut().zip(data) {
            *slot = dot(row, v);
        }
        theta.push(estimate_with_scheme(&projected, &scheme, cfg)?.estimate);
    }
    Ok(DirectionalEstimates {
        directions: dirs.clone(),
        theta,
        config: cfg.clone(),
    })
}

/// Worst slab violation of a candidate point: `max_i |<y, v_i> - theta_i|`.
pub fn slab_epsilon(y: &[f64], de: &DirectionalEstimates) -> Result<f64> {
    if y.len() != de.directions.dim() {
        return Err(Error::Parameter(format!(
            "point dimension {} does not match directions dimension {}",
            y.len(),
            de.directions.dim()
        )));
    }
    Ok(de
        .directions
        .vectors
        .iter()
        .zip(&de.theta)
        .map(|(v, t)| (dot(y, v) - t).abs())
        .fold(0.0, f64::max))
}

/// Gaussian elimination with partial pivoting; `None` when near-singular.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let d = b.len();
    for col in 0..d {
        let pivot = (col..d).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..d {
            let factor = a[row][col] / a[col][col];
            for j in col..d {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; d];
    for row in (0..d).rev() {
        let mut acc = b[row];
        for j in row + 1..d {
            acc -= a[row][j] * x[j];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Least-squares fit of `<y, v_i> ~ theta_i`, used as the default solver
/// initialization.
fn least_squares_init(de: &DirectionalEstimates) -> Vec<f64> {
    let d = de.directions.dim();
    let mut a = vec![vec![0.0; d]; d];
    let mut b = vec![0.0; d];
    for (v, &t) in de.directions.vectors.iter().zip(&de.theta) {
        for i in 0..d {
            for j in 0..d {
                a[i][j] += v[i] * v[j];
            }
            b[i] += v[i] * t;
        }
    }
    // tiny ridge keeps degenerate direction sets solvable
    for i in 0..d {
        a[i][i] += 1e-10;
    }
    solve_linear(a, b).unwrap_or_else(|| vec![0.0; d])
}

/// Minimize `slab_epsilon` by projected subgradient with Polyak-style steps
/// against a halving target gap, starting from a least-squares fit.
pub fn solve_slab_intersection(
    de: &DirectionalEstimates,
    tol: f64,
    max_iter: usize,
) -> Result<SlabSolution> {
    let init = least_squares_init(de);
    solve_slab_intersection_from(de, init, tol, max_iter)
}

/// Same solver with a caller-chosen starting point.
pub fn solve_slab_intersection_from(
    de: &DirectionalEstimates,
    init: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<SlabSolution> {
    if de.directions.vectors.is_empty() {
        return Err(Error::Parameter("need at least one direction".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("tol must be positive".into()));
    }
    let d = de.directions.dim();
    if init.len() != d {
        return Err(Error::Parameter("init dimension mismatch".into()));
    }

    let eval = |y: &[f64]| -> (f64, usize, f64) {
        let mut best = -1.0;
        let mut idx = 0;
        let mut sign = 1.0;
        for (i, (v, &t)) in de.directions.vectors.iter().zip(&de.theta).enumerate() {
            let r = dot(y, v) - t;
            if r.abs() > best {
                best = r.abs();
                idx = i;
                sign = if r >= 0.0 { 1.0 } else { -1.0 };
            }
        }
        (best, idx, sign)
    };

    let mut y = init;
    let (mut f_best, _, _) = eval(&y);
    let mut y_best = y.clone();
    let mut gap = (0.5 * f_best).max(tol);
    let mut iterations = 0;
    // generous stall window: ill-conditioned direction sets (near-parallel
    // slabs) progress slowly along the valley and must not trigger an early
    // gap halving
    let stall_window = 2000;

    // f_best <= 0.5*tol ends the solve outright; without that check an
    // already-optimal start with f_best = 0 would loop forever (the target
    // clamps to 0 and every level is "reached" without a step)
    while gap > 0.5 * tol && f_best > 0.5 * tol && iterations < max_iter {
        // keep the level strictly below the incumbent: after a sharp drop in
        // f_best the gap could exceed 4*f_best, where the level test passes
        // without taking a step and no progress is ever made
        gap = gap.min((0.5 * f_best).max(0.5 * tol));
        let target = (f_best - gap).max(0.0);
        let mut since_improve = 0;
        let mut level_reached = false;
        while iterations < max_iter {
            let (f, idx, sign) = eval(&y);
            if f < f_best {
                f_best = f;
                y_best.copy_from_slice(&y);
                since_improve = 0;
            } else {
                since_improve += 1;
            }
            if f_best <= target + 0.25 * gap {
                level_reached = true;
                break;
            }
            if since_improve > stall_window {
                break;
            }
            // Polyak step toward the target level; directions are unit norm.
            let step = f - target;
            let v = &de.directions.vectors[idx];
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi -= step * sign * vi;
            }
            iterations += 1;
        }
        if !level_reached {
            gap *= 0.5;
            // resume from the incumbent: the failed level's overshooting
            // steps may have drifted y far from the good region
            y.copy_from_slice(&y_best);
        }
    }

    // derivative-free compass polish. Subgradient steps zigzag across flat
    // valleys (near-parallel slabs) without advancing along them; the probe
    // set therefore includes normalized sums and differences of normal
    // pairs, which align with those valley axes.
    let mut probes: Vec<Vec<f64>> = de.directions.vectors.to_vec();
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        probes.push(e);
    }
    let m = de.directions.vectors.len();
    for i in 0..m {
        for j in (i + 1)..m {
            for sgn in [1.0, -1.0] {
                let u = &de.directions.vectors[i];
                let w = &de.directions.vectors[j];
                let p: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + sgn * b).collect();
                let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    probes.push(p.into_iter().map(|x| x / norm).collect());
                }
            }
        }
    }
    let mut step = (0.1 * f_best).max(tol);
    while step > 0.25 * tol && iterations < max_iter {
        let mut improved = false;
        for p in &probes {
            for sgn in [1.0, -1.0] {
                let cand: Vec<f64> = y_best
                    .iter()
                    .zip(p)
                    .map(|(yi, pi)| yi + sgn * step * pi)
                    .collect();
                let (f, _, _) = eval(&cand);
                iterations += 1;
                if f < f_best {
                    f_best = f;
                    y_best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(SlabSolution {
        mu_hat: y_best,
        eps_star: f_best,
        solver_iterations: iterations,
        residual_gap: gap,
    })
}

/// Full multivariate pipeline: random sphere plus basis directions, shared
/// partition, slab intersection initialized at the coordinatewise
/// median-of-means.
pub fn estimate_multivariate(
    data: &[Vec<f64>],
    m_directions: usize,
    cfg: &EstimatorConfig,
    tol: f64,
) -> Result<SlabSolution> {
    if data.is_empty() {
        return Err(Error::Parameter("data must be nonempty".into()));
    }
    let d = data[0].len();
    let dirs = DirectionSet::random_sphere(d, m_directions, cfg.seed)?
        .union(DirectionSet::basis(d))?;
    let de = directional_estimates(data, &dirs, cfg)?;
    let mut init = Vec::with_capacity(d);
    let mut column = vec![0.0; data.len()];
    for j in 0..d {
        for (slot, row) in column.iter_mut().zip(data) {
            *slot = row[j];
        }
        init.push(estimate_mom(&column, cfg.k, cfg.seed)?);
    }
    let m_total = dirs.vectors.len();
    let cap = (10 * d * m_total).max(20_000);
    solve_slab_intersection_from(&de, init, tol, cap)
}
