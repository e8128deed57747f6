use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::{Error, Result};

/// Two-sided 99% normal critical value.
pub const Z_CRITICAL: f64 = 2.576;

/// Most-common-value estimate for one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McvEstimate {
    pub samples: u64,
    pub max_count: u64,
    pub p_hat: f64,
    pub p_upper: f64,
    /// Bits per sample.
    pub h_min: f64,
}

/// Estimate from the most frequent count and the sample total.
pub fn mcv_from_counts(max_count: u64, total: u64) -> Result<McvEstimate> {
    if total < 2 {
        return Err(Error::InsufficientData {
            what: "most common value estimate",
            needed: 2,
            got: total as usize,
        });
    }
    if max_count > total {
        return Err(Error::param(format!(
            "count {max_count} exceeds total {total}"
        )));
    }
    let n = total as f64;
    let p_hat = max_count as f64 / n;
    let p_upper = (p_hat + Z_CRITICAL * (p_hat * (1.0 - p_hat) / (n - 1.0)).sqrt()).min(1.0);
    Ok(McvEstimate {
        samples: total,
        max_count,
        p_hat,
        p_upper,
        h_min: 0.0 - p_upper.log2(),
    })
}

pub fn mcv_estimate(data: &Dataset) -> Result<McvEstimate> {
    let mut counts = vec![0u64; data.alphabet_size()];
    for &s in &data.samples {
        counts[s as usize] += 1;
    }
    let max = counts.into_iter().max().unwrap_or(0);
    mcv_from_counts(max, data.len() as u64)
}

fn bitstring_estimate(data: &Dataset) -> Result<McvEstimate> {
    let ones: u64 = data
        .samples
        .iter()
        .map(|&s| u64::from(s.count_ones()))
        .sum();
    let total = data.len() as u64 * u64::from(data.n);
    mcv_from_counts(ones.max(total - ones), total)
}

/// Symbol and bitstring estimates combined into one per-symbol figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinEntropyEstimate {
    pub n: u8,
    pub symbol: McvEstimate,
    pub bitstring: McvEstimate,
    /// Bits per symbol.
    pub h_symbol: f64,
    /// Bits per bit.
    pub h_bitstring: f64,
    /// `min(h_symbol, n * h_bitstring)`, bits per symbol.
    pub min_entropy: f64,
}

pub fn min_entropy(data: &Dataset) -> Result<MinEntropyEstimate> {
    let symbol = mcv_estimate(data)?;
    let bitstring = if data.is_binary() {
        symbol
    } else {
        bitstring_estimate(data)?
    };
    let scaled = f64::from(data.n) * bitstring.h_min;
    Ok(MinEntropyEstimate {
        n: data.n,
        symbol,
        bitstring,
        h_symbol: symbol.h_min,
        h_bitstring: bitstring.h_min,
        min_entropy: symbol.h_min.min(scaled),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let e = mcv_from_counts(300, 1000).unwrap();
        // 0.3 + 2.576 * sqrt(0.21 / 999)
        assert!((e.p_upper - 0.337_348_465_4).abs() < 1e-9);
        assert!((e.h_min - 1.567_688_496).abs() < 1e-8);
    }

    #[test]
    fn all_identical_gives_zero() {
        let e = mcv_from_counts(10, 10).unwrap();
        assert_eq!(e.p_upper, 1.0);
        assert_eq!(e.h_min, 0.0);
        assert!(e.h_min.is_sign_positive());
    }

    #[test]
    fn needs_two_samples() {
        assert!(matches!(
            mcv_from_counts(1, 1),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn binary_collapse() {
        let d = Dataset::new(vec![0, 1, 1, 0, 1, 1, 1, 0], 1).unwrap();
        let m = min_entropy(&d).unwrap();
        assert_eq!(m.h_symbol, m.h_bitstring);
        assert_eq!(m.min_entropy, m.h_symbol);
    }

    #[test]
    fn bitstring_counts_majority_bit() {
        // 0x0f and 0xff: 12 ones out of 16 bits
        let d = Dataset::new(vec![0x0f, 0xff], 8).unwrap();
        let m = min_entropy(&d).unwrap();
        assert_eq!(m.bitstring.max_count, 12);
        assert_eq!(m.bitstring.samples, 16);
    }

    #[test]
    fn monotone_in_p_hat() {
        let mut prev = f64::INFINITY;
        for c in 1..=1000 {
            let h = mcv_from_counts(c, 1000).unwrap().h_min;
            assert!(h <= prev);
            prev = h;
        }
    }
}
