use serde::{Deserialize, Serialize};

use super::correlation::pair_counts;
use super::embed::embed;
use crate::{Error, Result};

/// Order-2 Rényi entropy estimates over a range of distance thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K2Curve {
    /// Thresholds, descending.
    pub epsilons: Vec<f64>,
    /// `None` where some `CI_{d+1}(ε)` vanished.
    pub k2_values: Vec<Option<f64>>,
    pub unit: String,
}

impl K2Curve {
    pub fn usable(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.epsilons
            .iter()
            .zip(&self.k2_values)
            .filter_map(|(&e, k)| k.map(|k| (e, k)))
    }

    /// Ratio of the largest to the smallest usable estimate.
    pub fn max_min_ratio(&self) -> Option<f64> {
        let (lo, hi) = self
            .usable()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, k)| {
                (lo.min(k), hi.max(k))
            });
        (hi.is_finite() && lo > 0.0).then(|| hi / lo)
    }
}

/// Grassberger–Procaccia K2 estimate
/// `K2(ε) = (1/lag) · mean_{d ∈ dims} ln[CI_d(ε) / CI_{d+1}(ε)]`
/// in nats per sample.
///
/// All embeddings use the point count of the largest dimension so the
/// correlation sums are taken over the same reference points.
pub fn k2_estimate(
    series: &[f64],
    dims: std::ops::RangeInclusive<usize>,
    eps_grid: &[f64],
    lag: usize,
    theiler: usize,
) -> Result<K2Curve> {
    let (d_lo, d_hi) = (*dims.start(), *dims.end());
    if d_lo == 0 || d_hi <= d_lo {
        return Err(Error::param(format!(
            "K2 needs a contiguous range of at least two dimensions, got {d_lo}..={d_hi}"
        )));
    }
    if eps_grid.is_empty()
        || eps_grid.iter().any(|&e| !(e > 0.0))
        || eps_grid.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(Error::param(
            "epsilon grid must be positive and strictly descending",
        ));
    }
    let top = d_hi + 1;
    let reference = embed(series, top, lag)?;
    let points = reference.len();
    if points < theiler + 2 {
        return Err(Error::InsufficientData {
            what: "K2 estimate (points at the largest dimension)",
            needed: theiler + 2,
            got: points,
        });
    }
    let ascending: Vec<f64> = eps_grid.iter().rev().copied().collect();
    let mut counts = Vec::with_capacity(top - d_lo + 1);
    for d in d_lo..=top {
        let mut emb = embed(series, d, lag)?;
        emb.truncate(points);
        let mut c = pair_counts(&emb, &ascending, theiler);
        c.reverse();
        counts.push(c);
    }
    let span = (d_hi - d_lo + 1) as f64;
    let k2_values = (0..eps_grid.len())
        .map(|e| {
            let mut acc = 0.0;
            for k in 0..(d_hi - d_lo + 1) {
                let (num, den) = (counts[k][e], counts[k + 1][e]);
                if den == 0 {
                    return None;
                }
                acc += (num as f64 / den as f64).ln();
            }
            Some(acc / span / lag as f64)
        })
        .collect();
    Ok(K2Curve {
        epsilons: eps_grid.to_vec(),
        k2_values,
        unit: "nats/sample".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::log_grid;
    use rand::{Rng, SeedableRng};

    fn descending(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let mut g = log_grid(lo, hi, n);
        g.reverse();
        g
    }

    #[test]
    fn constant_series_has_zero_k2() {
        let c = k2_estimate(&[2.0; 300], 1..=2, &descending(0.01, 0.5, 6), 1, 0).unwrap();
        assert!(c.usable().count() == 6);
        assert!(c.usable().all(|(_, k)| k == 0.0));
    }

    #[test]
    fn iid_k2_grows_as_epsilon_shrinks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let s: Vec<f64> = (0..3000).map(|_| f64::from(rng.random::<u8>())).collect();
        let c = k2_estimate(&s, 1..=2, &descending(0.05, 0.5, 8), 1, 0).unwrap();
        let vals: Vec<f64> = c.usable().map(|(_, k)| k).collect();
        assert_eq!(vals.len(), 8);
        for w in vals.windows(2) {
            assert!(w[1] > w[0], "{vals:?}");
        }
    }

    #[test]
    fn vanishing_sums_mark_epsilon_unusable() {
        let s: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let c = k2_estimate(&s, 1..=2, &[0.5, 1e-6], 1, 0).unwrap();
        assert!(c.k2_values[0].is_some());
        assert!(c.k2_values[1].is_none());
    }

    #[test]
    fn bad_arguments() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(k2_estimate(&s, 2..=2, &[0.5, 0.1], 1, 0).is_err());
        assert!(k2_estimate(&s, 1..=2, &[0.1, 0.5], 1, 0).is_err());
        assert!(k2_estimate(&s, 1..=2, &[0.5, 0.1], 3, 0).is_err());
    }
}
