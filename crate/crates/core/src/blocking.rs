//! Block schemes over sample indices: disjoint partitions for the
//! block estimator, exhaustive or sampled size-n subsets for the
//! U-statistic variant, and block mean computation.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Default cap on the number of enumerated subsets.
pub const ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockSchemeKind {
    Disjoint,
    ExhaustiveSubsets,
    SampledSubsets,
}

/// A family of index subsets of `{0..N}`, each of size `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockScheme {
    pub kind: BlockSchemeKind,
    pub blocks: Vec<Vec<usize>>,
    pub n: usize,
    pub seed: u64,
}

impl BlockScheme {
    pub fn k_effective(&self) -> usize {
        self.blocks.len()
    }

    /// FNV-1a hash of the block structure, for reproducibility audits.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut mix = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        mix(self.blocks.len() as u64);
        for block in &self.blocks {
            for &i in block {
                mix(i as u64);
            }
            mix(u64::MAX);
        }
        format!("{h:016x}")
    }
}

/// Arithmetic means of a sample over each block of a scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMeans {
    pub values: Vec<f64>,
    pub n: usize,
    pub scheme_kind: BlockSchemeKind,
}

/// `C(n, r)` with saturation above `cap`; returns `None` once the value
/// exceeds `cap` (exact value no longer needed then).
pub fn binomial_capped(n: u64, r: u64, cap: u128) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
        if acc > cap.saturating_mul(2) {
            return None;
        }
    }
    Some(acc)
}

/// Split a seeded uniformly random permutation of `{0..N}` into `k`
/// consecutive chunks of size `floor(N/k)`; trailing indices are dropped.
pub fn partition_disjoint(total: usize, k: usize, seed: u64) -> Result<BlockScheme> {
    if k < 1 || k > total {
        return Err(Error::Parameter(format!(
            "block count k={k} must satisfy 1 <= k <= N={total}"
        )));
    }
    partition_disjoint_sized(total, k, total / k, seed)
}

/// Same as [`partition_disjoint`] but with an explicit block size `n`
/// (requires `k * n <= N`).
pub fn partition_disjoint_sized(total: usize, k: usize, n: usize, seed: u64) -> Result<BlockScheme> {
    if k < 1 || n < 1 || k.checked_mul(n).map_or(true, |kn| kn > total) {
        return Err(Error::Parameter(format!(
            "need k >= 1, n >= 1 and k*n <= N, got k={k}, n={n}, N={total}"
        )));
    }
    let mut perm: Vec<usize> = (0..total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    let blocks = perm.chunks_exact(n).take(k).map(|c| c.to_vec()).collect();
    Ok(BlockScheme {
        kind: BlockSchemeKind::Disjoint,
        blocks,
        n,
        seed,
    })
}

/// All `C(N, n)` size-n subsets in lexicographic order.
pub fn enumerate_subsets(total: usize, n: usize) -> Result<BlockScheme> {
    enumerate_subsets_capped(total, n, ENUMERATION_CAP)
}

pub fn enumerate_subsets_capped(total: usize, n: usize, cap: u128) -> Result<BlockScheme> {
    if n < 1 || n > total {
        return Err(Error::Parameter(format!(
            "subset size n={n} must satisfy 1 <= n <= N={total}"
        )));
    }
    let count = binomial_capped(total as u64, n as u64, cap);
    match count {
        Some(c) if c <= cap => {}
        Some(c) => return Err(Error::Capacity { requested: c, cap }),
        None => {
            return Err(Error::Capacity {
                requested: u128::MAX,
                cap,
            })
        }
    }
    let mut blocks = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        blocks.push(current.clone());
        // advance to the next subset in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(BlockScheme {
                    kind: BlockSchemeKind::ExhaustiveSubsets,
                    blocks,
                    n,
                    seed: 0,
                });
            }
            i -= 1;
            if current[i] != i + total - n {
                break;
            }
        }
        current[i] += 1;
        for j in i + 1..n {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// How [`sample_subsets`] draws from the family of all size-n subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetSamplingMode {
    /// `B` independent uniform draws with replacement (the incomplete
    /// U-statistic surrogate).
    WithReplacement,
    /// Draw until all `C(N,n)` distinct subsets were seen; only feasible at
    /// tiny N, used as an oracle against exhaustive enumeration.
    DedupUntilComplete,
}

/// `B` size-n subsets drawn uniformly (each without replacement within
/// itself); reproducible from `seed`. Subsets are stored sorted.
pub fn sample_subsets(
    total: usize,
    n: usize,
    draws: usize,
    seed: u64,
    mode: SubsetSamplingMode,
) -> Result<BlockScheme> {
    if n < 1 || n > total {
        return Err(Error::Parameter(format!(
            "subset size n={n} must satisfy 1 <= n <= N={total}"
        )));
    }
    if draws < 1 {
        return Err(Error::Parameter("draw count B must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_one = |rng: &mut ChaCha8Rng| {
        let mut idx: Vec<usize> = rand::seq::index::sample(rng, total, n).into_vec();
        idx.sort_unstable();
        idx
    };
    let blocks = match mode {
        SubsetSamplingMode::WithReplacement => (0..draws).map(|_| draw_one(&mut rng)).collect(),
        SubsetSamplingMode::DedupUntilComplete => {
            let target = match binomial_capped(total as u64, n as u64, ENUMERATION_CAP) {
                Some(c) if c <= ENUMERATION_CAP => c as usize,
                other => {
                    return Err(Error::Capacity {
                        requested: other.unwrap_or(u128::MAX),
                        cap: ENUMERATION_CAP,
                    })
                }
            };
            let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
            while seen.len() < target {
                seen.insert(draw_one(&mut rng));
            }
            seen.into_iter().collect()
        }
    };
    Ok(BlockScheme {
        kind: BlockSchemeKind::SampledSubsets,
        blocks,
        n,
        seed,
    })
}

/// Per-block arithmetic means of `sample` under `scheme`.
pub fn block_means(sample: &[f64], scheme: &BlockScheme) -> Result<BlockMeans> {
    let mut values = Vec::with_capacity(scheme.blocks.len());
    for block in &scheme.blocks {
        let mut sum = 0.0;
        for &i in block {
            let x = *sample.get(i).ok_or_else(|| {
                Error::Consistency(format!(
                    "block index {i} out of range for sample of length {}",
                    sample.len()
                ))
            })?;
            sum += x;
        }
        values.push(sum / block.len() as f64);
    }
    Ok(BlockMeans {
        values,
        n: scheme.n,
        scheme_kind: scheme.kind,
    })
}
