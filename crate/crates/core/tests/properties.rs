//! Randomized property tests for the structural invariants: block-scheme
//! shape, estimator equivariances, score monotonicity, determinism, and
//! majority-block containment under adversarial block means.

use blockmean::{
    block_means, estimate_block_huber, estimate_catoni_limit, estimate_mom, partition_disjoint,
    sample_subsets, solve_slab_intersection, BlockMeans, BlockSchemeKind, DirectionSet,
    EstimatorConfig, ScoreFunction, SubsetSamplingMode,
};
use proptest::prelude::*;

fn finite_sample(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6..1e6f64, 2..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disjoint_partition_shape(total in 1usize..200, k_raw in 1usize..40, seed in any::<u64>()) {
        let k = k_raw.min(total);
        let scheme = partition_disjoint(total, k, seed).unwrap();
        let n = total / k;
        prop_assert_eq!(scheme.k_effective(), k);
        let mut seen = std::collections::HashSet::new();
        for block in &scheme.blocks {
            prop_assert_eq!(block.len(), n);
            for &i in block {
                prop_assert!(i < total);
                prop_assert!(seen.insert(i), "index {} reused", i);
            }
        }
        prop_assert_eq!(seen.len(), k * n);
    }

    #[test]
    fn sampled_subsets_shape(total in 2usize..30, n_raw in 1usize..6, draws in 1usize..50, seed in any::<u64>()) {
        let n = n_raw.min(total);
        let scheme = sample_subsets(total, n, draws, seed, SubsetSamplingMode::WithReplacement).unwrap();
        prop_assert_eq!(scheme.k_effective(), draws);
        prop_assert_eq!(scheme.kind, BlockSchemeKind::SampledSubsets);
        for block in &scheme.blocks {
            prop_assert_eq!(block.len(), n);
            prop_assert!(block.windows(2).all(|w| w[0] < w[1]), "indices sorted, distinct");
            prop_assert!(block.iter().all(|&i| i < total));
        }
    }

    #[test]
    fn block_means_are_means(sample in finite_sample(100), k_raw in 1usize..10, seed in any::<u64>()) {
        let k = k_raw.min(sample.len());
        let scheme = partition_disjoint(sample.len(), k, seed).unwrap();
        let bm = block_means(&sample, &scheme).unwrap();
        for (value, block) in bm.values.iter().zip(&scheme.blocks) {
            let direct: f64 = block.iter().map(|&i| sample[i]).sum::<f64>() / block.len() as f64;
            prop_assert!((value - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn estimator_is_deterministic(sample in finite_sample(80), k_raw in 1usize..8, seed in any::<u64>()) {
        let k = k_raw.min(sample.len());
        let cfg = EstimatorConfig::new(k, 1.0).with_seed(seed);
        let a = estimate_block_huber(&sample, &cfg).unwrap();
        let b = estimate_block_huber(&sample, &cfg).unwrap();
        prop_assert_eq!(a.estimate, b.estimate);
        prop_assert_eq!(a.scheme_digest, b.scheme_digest);
    }

    #[test]
    fn translation_equivariance(sample in finite_sample(80), k_raw in 1usize..8, shift in -1e4..1e4f64, seed in any::<u64>()) {
        let k = k_raw.min(sample.len());
        let cfg = EstimatorConfig::new(k, 2.5).with_seed(seed);
        let base = estimate_block_huber(&sample, &cfg).unwrap().estimate;
        let shifted: Vec<f64> = sample.iter().map(|x| x + shift).collect();
        let moved = estimate_block_huber(&shifted, &cfg).unwrap().estimate;
        let tol = cfg.root_tol * (1.0 + shift.abs()) + 1e-9 * (1.0 + base.abs());
        prop_assert!((moved - (base + shift)).abs() <= tol, "{} vs {}", moved, base + shift);
    }

    #[test]
    fn scale_equivariance(sample in finite_sample(80), k_raw in 1usize..8, scale in 0.01..100.0f64, seed in any::<u64>()) {
        let k = k_raw.min(sample.len());
        let mut cfg = EstimatorConfig::new(k, 2.5).with_seed(seed);
        let base = estimate_block_huber(&sample, &cfg).unwrap().estimate;
        let scaled: Vec<f64> = sample.iter().map(|x| x * scale).collect();
        // delta is in data units, so it scales with the sample; root_tol too
        cfg.delta *= scale;
        cfg.root_tol *= scale;
        let moved = estimate_block_huber(&scaled, &cfg).unwrap().estimate;
        let tol = cfg.root_tol + 1e-9 * scale * (1.0 + base.abs());
        prop_assert!((moved - scale * base).abs() <= tol, "{} vs {}", moved, scale * base);
    }

    #[test]
    fn mom_between_min_and_max(sample in finite_sample(60), k_raw in 1usize..8, seed in any::<u64>()) {
        let k = k_raw.min(sample.len());
        let m = estimate_mom(&sample, k, seed).unwrap();
        let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m >= lo - 1e-9 && m <= hi + 1e-9);
    }

    #[test]
    fn score_curve_nonincreasing(means in prop::collection::vec(-100.0..100.0f64, 1..20),
                                 z1 in -200.0..200.0f64, dz in 0.0..50.0f64,
                                 delta in 0.5..10.0f64) {
        let bm = BlockMeans { values: means, n: 4, scheme_kind: BlockSchemeKind::Disjoint };
        let cfg = EstimatorConfig::new(bm.values.len(), delta);
        let g1 = blockmean::univariate::score_curve(z1, &bm, &cfg).unwrap();
        let g2 = blockmean::univariate::score_curve(z1 + dz, &bm, &cfg).unwrap();
        prop_assert!(g2 <= g1 + 1e-12);
    }

    #[test]
    fn majority_containment_adversarial(
        a in -50.0..50.0f64,
        width in 0.0..10.0f64,
        delta in 0.5..5.0f64,
        honest in 6usize..15,
        corrupt_raw in 0usize..5,
        corrupt_value in prop::sample::select(vec![-1e12, -1e3, 1e3, 1e12]),
    ) {
        // >k/2 block means inside [a, b], the rest arbitrary
        let b = a + width;
        let corrupt = corrupt_raw.min(honest - 1);
        let mut means: Vec<f64> = (0..honest)
            .map(|i| a + width * (i as f64 / (honest - 1).max(1) as f64))
            .collect();
        means.extend(std::iter::repeat(corrupt_value).take(corrupt));
        let n = 4usize;
        let bm = BlockMeans { values: means, n, scheme_kind: BlockSchemeKind::Disjoint };
        let cfg = EstimatorConfig::new(bm.values.len(), delta);
        let root = {
            // identity partition reproduces the designed block means exactly:
            // each mean repeated n times, blocks of consecutive indices
            let sample: Vec<f64> = bm.values.iter().flat_map(|&m| std::iter::repeat(m).take(n)).collect();
            let scheme = blockmean::BlockScheme {
                kind: BlockSchemeKind::Disjoint,
                blocks: (0..bm.values.len()).map(|j| (j * n..(j + 1) * n).collect()).collect(),
                n,
                seed: 0,
            };
            let mut c = cfg.clone();
            c.n = Some(n);
            blockmean::estimate_with_scheme(&sample, &scheme, &c).unwrap().estimate
        };
        let margin = 2.0 * delta / (n as f64).sqrt();
        prop_assert!(root >= a - margin && root <= b + margin,
            "root {} outside [{}, {}]", root, a - margin, b + margin);
    }

    #[test]
    fn catoni_limit_matches_full_block_config(sample in finite_sample(50), delta in 0.5..10.0f64) {
        let res = estimate_catoni_limit(&sample, delta, ScoreFunction::huber()).unwrap();
        let mut cfg = EstimatorConfig::new(sample.len(), delta);
        cfg.n = Some(1);
        let direct = estimate_block_huber(&sample, &cfg).unwrap();
        prop_assert_eq!(res.estimate, direct.estimate);
    }

    #[test]
    fn slab_solution_translation_equivariance(
        theta in prop::collection::vec(-10.0..10.0f64, 3..4),
        shift in prop::collection::vec(-5.0..5.0f64, 2),
    ) {
        // directions: 2-d basis plus a diagonal; one theta per direction
        let dirs = DirectionSet::basis(2)
            .union(DirectionSet::user(vec![vec![
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ]]).unwrap())
            .unwrap();
        let de = blockmean::multivariate::DirectionalEstimates {
            directions: dirs.clone(),
            theta: theta.clone(),
            config: EstimatorConfig::new(1, 1.0),
        };
        let sol = solve_slab_intersection(&de, 1e-8, 50_000).unwrap();
        let theta_shifted: Vec<f64> = dirs
            .vectors
            .iter()
            .zip(&theta)
            .map(|(v, t)| t + v[0] * shift[0] + v[1] * shift[1])
            .collect();
        let de2 = blockmean::multivariate::DirectionalEstimates {
            directions: dirs,
            theta: theta_shifted,
            config: EstimatorConfig::new(1, 1.0),
        };
        let sol2 = solve_slab_intersection(&de2, 1e-8, 50_000).unwrap();
        // the optimal slab width is translation invariant
        prop_assert!((sol.eps_star - sol2.eps_star).abs() <= 1e-4 * (1.0 + sol.eps_star),
            "{} vs {}", sol.eps_star, sol2.eps_star);
    }
}
