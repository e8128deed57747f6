//! Entropy assessment following NIST SP 800-90B for IID sources.
//!
//! The pipeline first checks the IID assumption with the permutation
//! statistics and chi-square tests, then estimates min-entropy with the
//! most-common-value estimator on the symbol stream and on its bitstring,
//! runs the restart sanity check and estimates, and finally exposes the two
//! continuous health tests. Constants taken from the standard are collected
//! in `docs/conformance.md`.

mod assess;
mod binomial;
mod chi_square;
mod dataset;
mod health;
mod mcv;
mod permutation;
mod restart;
pub mod statistics;
mod substring;

pub use assess::{
    assess, AssessmentConfig, AssessmentReport, IidResult, RestartSection, REPORT_SCHEMA_VERSION,
};
pub use binomial::upper_quantile as binomial_upper_quantile;
pub use chi_square::{
    chi_square_tests, goodness_of_fit, independence, longest_repeated_substring, ChiSquareOutcome,
    CHI_SQUARE_SIGNIFICANCE, MIN_CHI_SQUARE_SAMPLES,
};
pub use dataset::{Dataset, RestartMatrix, RESTART_SIDE, SEQUENTIAL_SAMPLES};
pub use health::{
    adaptive_proportion_cutoff, adaptive_proportion_health, repetition_count_cutoff,
    repetition_count_health, AdaptiveProportionTest, HealthMonitor, HealthReport,
    RepetitionCountTest, BINARY_WINDOW, DEFAULT_ALPHA, DEFAULT_WINDOW,
};
pub use mcv::{
    mcv_estimate, mcv_from_counts, min_entropy, McvEstimate, MinEntropyEstimate, Z_CRITICAL,
};
pub use permutation::{
    extreme_rank_cutoff, permutation_test_suite, shuffled, PermutationConfig,
    PermutationTestOutcome, DEFAULT_PERMUTATIONS, MIN_PERMUTATIONS,
};
pub use restart::{restart_sanity_alpha, restart_tests, RestartOutcome};
