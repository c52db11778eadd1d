//! Heavy-tailed mean estimation with block-wise bounded scores.
//!
//! The central estimator splits a sample into `k` blocks, applies a bounded
//! score to standardized block means, and returns the root of the summed
//! score curve. Depending on the block count it interpolates between the
//! sample mean (`k = 1`, large truncation), a Catoni-style M-estimator
//! (`k = N`) and median-of-means (small truncation). Multivariate estimates
//! come from intersecting directional confidence slabs.

pub mod blocking;
pub mod contamination;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod multivariate;
pub mod score;
pub mod theory;
pub mod univariate;

pub use blocking::{
    binomial_capped, block_means, enumerate_subsets_capped, partition_disjoint,
    partition_disjoint_sized, sample_subsets, BlockMeans, BlockScheme, BlockSchemeKind,
    SubsetSamplingMode, ENUMERATION_CAP,
};
pub use contamination::{
    adaptive_worst_of, contaminate, contaminate_scalar, ContaminatedSample, ContaminationSpec,
    ContaminationStrategy,
};
pub use distributions::NamedDistribution;
pub use error::{Error, Result};
pub use harness::{
    derive_seed, empirical_quantile, run_contamination_sweep, run_deviation_study,
    run_regime_sweep, run_ustat_agreement, write_csv, ContaminationSweepConfig,
    ContaminationSweepReport, CsvRow, DeltaRule, DeviationReport, DeviationStudyConfig,
    RegimeSweepConfig, RegimeSweepReport, UstatAgreementConfig, UstatAgreementReport, CSV_HEADER,
    QUANTILE_LEVELS,
};
pub use multivariate::{
    directional_estimates, estimate_multivariate, solve_slab_intersection, DirectionKind,
    DirectionSet, DirectionalEstimates, SlabSolution,
};
pub use score::{validate_assumption, validate_psi, ScoreFunction, ScoreKind, ValidationReport};
pub use theory::{
    clt_error_envelope, clt_error_monte_carlo, clt_integral_envelope, contamination_envelope,
    MomentProfile, MonteCarloValue,
};
pub use univariate::{
    default_delta, estimate_block_huber, estimate_catoni_limit, estimate_mom, estimate_ustat,
    estimate_with_scheme, grand_block_mean, median, robust_sigma, sample_mean, DeltaRegime,
    EstimateResult, EstimatorConfig, UStatMode,
};
