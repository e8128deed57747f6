use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::statistics::{evaluate, Context, Statistic, PERMUTATION_STATISTICS};
use crate::{Error, Result};

/// Permutation count required for a conforming assessment.
pub const DEFAULT_PERMUTATIONS: usize = 10_000;
/// Smallest permutation count accepted.
pub const MIN_PERMUTATIONS: usize = 100;

/// Permutations evaluated between early-stopping checks. Fixed so the
/// reported counters do not depend on the worker count.
const BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub permutations: usize,
    pub seed: u64,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        Self {
            permutations: DEFAULT_PERMUTATIONS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationTestOutcome {
    pub statistic_name: String,
    pub statistic: Statistic,
    pub original_value: f64,
    /// Permutations whose statistic exceeded the original.
    pub counter_higher: u64,
    /// Permutations whose statistic equalled the original.
    pub counter_equal: u64,
    /// Permutations evaluated before the outcome was decided.
    pub permutations_run: u64,
    pub pass: bool,
}

/// Rank cutoff for `n_perm` permutations: 5 at the standard 10 000,
/// scaled proportionally otherwise.
pub fn extreme_rank_cutoff(n_perm: usize) -> u64 {
    (5 * n_perm as u64) / 10_000
}

/// Fisher–Yates shuffle number `iteration` of `data`, from a ChaCha8 stream
/// keyed by `seed`.
pub fn shuffled(data: &[u16], seed: u64, iteration: u64) -> Vec<u16> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    let mut out = data.to_vec();
    for i in (1..out.len()).rev() {
        let j = rng.random_range(0..=i);
        out.swap(i, j);
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
struct Counters {
    higher: u64,
    equal: u64,
    lower: u64,
}

impl Counters {
    fn decided_pass(&self, cutoff: u64) -> bool {
        self.higher + self.equal > cutoff && self.equal + self.lower > cutoff
    }

    fn pass(&self, n_perm: u64, cutoff: u64) -> bool {
        !(self.higher + self.equal <= cutoff || self.higher >= n_perm - cutoff)
    }
}

/// Runs the nineteen permutation statistics on `data`.
pub fn permutation_test_suite(
    data: &Dataset,
    config: &PermutationConfig,
) -> Result<Vec<PermutationTestOutcome>> {
    if config.permutations < MIN_PERMUTATIONS {
        return Err(Error::param(format!(
            "permutation count {} is below the minimum of {MIN_PERMUTATIONS}",
            config.permutations
        )));
    }
    if data.is_empty() {
        return Err(Error::InsufficientData {
            what: "permutation tests",
            needed: 1,
            got: 0,
        });
    }
    let seq = &data.samples;
    let ctx = Context::new(seq, data.is_binary());
    let original = evaluate(&PERMUTATION_STATISTICS, seq, &ctx);
    let n_perm = config.permutations as u64;
    let cutoff = extreme_rank_cutoff(config.permutations);

    let mut counters = [Counters::default(); PERMUTATION_STATISTICS.len()];
    let mut runs = [0u64; PERMUTATION_STATISTICS.len()];
    let mut pending: Vec<usize> = (0..PERMUTATION_STATISTICS.len()).collect();
    let mut done = 0u64;

    while done < n_perm && !pending.is_empty() {
        let batch = BATCH.min((n_perm - done) as usize) as u64;
        let stats: Vec<Statistic> = pending.iter().map(|&k| PERMUTATION_STATISTICS[k]).collect();
        let values: Vec<Vec<f64>> = (done..done + batch)
            .into_par_iter()
            .map(|it| evaluate(&stats, &shuffled(seq, config.seed, it), &ctx))
            .collect();
        for row in &values {
            for (slot, &k) in pending.iter().enumerate() {
                let c = &mut counters[k];
                match row[slot].partial_cmp(&original[k]) {
                    Some(std::cmp::Ordering::Greater) => c.higher += 1,
                    Some(std::cmp::Ordering::Less) => c.lower += 1,
                    _ => c.equal += 1,
                }
            }
        }
        done += batch;
        for &k in &pending {
            runs[k] = done;
        }
        pending.retain(|&k| !counters[k].decided_pass(cutoff));
    }

    Ok(PERMUTATION_STATISTICS
        .iter()
        .enumerate()
        .map(|(k, stat)| {
            let c = counters[k];
            let pass = c.decided_pass(cutoff) || c.pass(n_perm, cutoff);
            PermutationTestOutcome {
                statistic_name: stat.name(),
                statistic: *stat,
                original_value: original[k],
                counter_higher: c.higher,
                counter_equal: c.equal,
                permutations_run: runs[k],
                pass,
            }
        })
        .collect())
}
