//! Hidden-determinism diagnostics on time-delay embeddings.
//!
//! All distances use the Chebyshev (max-coordinate) metric. Correlation sums
//! count unordered pairs `i < j` with `j − i > theiler` and normalise by
//! `P(P − 1) / 2`, `P` being the number of embedded points.

mod correlation;
mod embed;
mod k2;
mod lorenz;

pub use correlation::{
    correlation_dimension, correlation_integral, correlation_sums, log_grid, pair_counts,
    recurrence_matrix, CorrDimCurve, CorrDimFit,
};
pub use embed::{embed, EmbeddedSeries};
pub use k2::{k2_estimate, K2Curve};
pub use lorenz::{lorenz_series, LorenzConfig};

/// Embedding delay, in samples.
pub const DEFAULT_LAG: usize = 5;
/// Temporal neighbours excluded from correlation sums.
pub const DEFAULT_THEILER: usize = 20;
/// Embedding dimensions averaged by the K2 estimate.
pub const DEFAULT_K2_DIMS: std::ops::RangeInclusive<usize> = 2..=4;
/// Integration step of the Lorenz reference.
pub const DEFAULT_LORENZ_DT: f64 = 0.01;
/// Integration steps per recorded Lorenz sample.
pub const DEFAULT_LORENZ_STRIDE: usize = 10;
