//! The permutation-test statistics.
//!
//! Each function computes one statistic on a given ordering of the samples.
//! For binary data the directional-run statistics use Conversion I (ones
//! count per 8-bit block) and the collision statistics use Conversion II
//! (8-bit blocks read as bytes); every other statistic uses the raw bits.

use std::io::Write;

use serde::{Deserialize, Serialize};

/// Lags used by the periodicity and covariance statistics.
pub const LAGS: [u32; 5] = [1, 2, 8, 16, 32];

/// bzip2 block size (in 100 kB units) used by the compression statistic.
pub const COMPRESSION_LEVEL: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Excursion,
    DirectionalRuns,
    DirectionalRunLength,
    IncreasesDecreases,
    MedianRuns,
    MedianRunLength,
    AverageCollision,
    MaximumCollision,
    Periodicity(u32),
    Covariance(u32),
    Compression,
}

/// The nineteen permutation statistics in reporting order.
pub const PERMUTATION_STATISTICS: [Statistic; 19] = [
    Statistic::Excursion,
    Statistic::DirectionalRuns,
    Statistic::DirectionalRunLength,
    Statistic::IncreasesDecreases,
    Statistic::MedianRuns,
    Statistic::MedianRunLength,
    Statistic::AverageCollision,
    Statistic::MaximumCollision,
    Statistic::Periodicity(1),
    Statistic::Periodicity(2),
    Statistic::Periodicity(8),
    Statistic::Periodicity(16),
    Statistic::Periodicity(32),
    Statistic::Covariance(1),
    Statistic::Covariance(2),
    Statistic::Covariance(8),
    Statistic::Covariance(16),
    Statistic::Covariance(32),
    Statistic::Compression,
];

impl Statistic {
    pub fn name(&self) -> String {
        match self {
            Statistic::Excursion => "Excursion Test Statistic".into(),
            Statistic::DirectionalRuns => "Number of Directional Runs".into(),
            Statistic::DirectionalRunLength => "Length of Directional Runs".into(),
            Statistic::IncreasesDecreases => "Number of Increases and Decreases".into(),
            Statistic::MedianRuns => "Number of Runs Based on the Median".into(),
            Statistic::MedianRunLength => "Length of Runs Based on Median".into(),
            Statistic::AverageCollision => "Average Collision Test Statistic".into(),
            Statistic::MaximumCollision => "Maximum Collision Test Statistic".into(),
            Statistic::Periodicity(lag) => format!("Periodicity Test Statistic (Lag={lag})"),
            Statistic::Covariance(lag) => format!("Covariance Test Statistic (Lag={lag})"),
            Statistic::Compression => "Compression Test Statistic".into(),
        }
    }
}

/// Maximum over prefixes of `|Σ_{j≤i} s_j − i·mean|`.
pub fn excursion(seq: &[u16]) -> f64 {
    if seq.is_empty() {
        return 0.0;
    }
    // Work with L·(prefix sum) − i·total to stay in exact integers.
    let len = seq.len() as i128;
    let total: i128 = seq.iter().map(|&v| i128::from(v)).sum();
    let mut prefix = 0i128;
    let mut best = 0i128;
    for (i, &v) in seq.iter().enumerate() {
        prefix += i128::from(v);
        let d = (len * prefix - (i as i128 + 1) * total).abs();
        best = best.max(d);
    }
    best as f64 / len as f64
}

/// +1 for `s_i ≤ s_{i+1}`, −1 for `s_i > s_{i+1}`.
fn directional_signs(seq: &[u16]) -> impl Iterator<Item = bool> + '_ {
    seq.windows(2).map(|w| w[0] <= w[1])
}

fn runs(signs: impl Iterator<Item = bool>) -> (u64, u64) {
    let mut count = 0u64;
    let mut longest = 0u64;
    let mut current = 0u64;
    let mut prev: Option<bool> = None;
    for s in signs {
        if prev == Some(s) {
            current += 1;
        } else {
            count += 1;
            current = 1;
            prev = Some(s);
        }
        longest = longest.max(current);
    }
    (count, longest)
}

/// (number of directional runs, longest directional run)
pub fn directional_runs(seq: &[u16]) -> (u64, u64) {
    runs(directional_signs(seq))
}

/// `max(#increases, #decreases)`, equal neighbours counting as increases.
pub fn increases_decreases(seq: &[u16]) -> u64 {
    let ups = directional_signs(seq).filter(|&s| s).count() as u64;
    let total = seq.len().saturating_sub(1) as u64;
    ups.max(total - ups)
}

/// (number of runs, longest run) of the sequence `s_i ≥ median`.
pub fn median_runs(seq: &[u16], median: f64) -> (u64, u64) {
    runs(seq.iter().map(|&v| f64::from(v) >= median))
}

/// Median of the samples; mean of the middle pair for even lengths.
pub fn median(seq: &[u16]) -> f64 {
    if seq.is_empty() {
        return 0.0;
    }
    let mut counts = std::collections::BTreeMap::new();
    for &v in seq {
        *counts.entry(v).or_insert(0usize) += 1;
    }
    let nth = |k: usize| {
        let mut seen = 0;
        for (&v, &c) in &counts {
            seen += c;
            if seen > k {
                return f64::from(v);
            }
        }
        unreachable!()
    };
    let l = seq.len();
    if l % 2 == 1 {
        nth(l / 2)
    } else {
        0.5 * (nth(l / 2 - 1) + nth(l / 2))
    }
}

/// (average, maximum) collision distance.
///
/// Scanning left to right, each collision length is the number of samples
/// read from the current start until a value repeats; the scan then resumes
/// after the repeating sample.
pub fn collisions(seq: &[u16]) -> (f64, u64) {
    let mut stamp = vec![0u32; 1 << 16];
    let mut generation = 0u32;
    let mut total = 0u64;
    let mut count = 0u64;
    let mut max = 0u64;
    let mut i = 0usize;
    'outer: while i < seq.len() {
        generation += 1;
        let mut j = i;
        while j < seq.len() {
            let v = seq[j] as usize;
            if stamp[v] == generation {
                let len = (j - i + 1) as u64;
                total += len;
                count += 1;
                max = max.max(len);
                i = j + 1;
                continue 'outer;
            }
            stamp[v] = generation;
            j += 1;
        }
        break;
    }
    if count == 0 {
        (0.0, 0)
    } else {
        (total as f64 / count as f64, max)
    }
}

pub fn periodicity(seq: &[u16], lag: usize) -> u64 {
    if seq.len() <= lag {
        return 0;
    }
    seq.iter().zip(&seq[lag..]).filter(|(a, b)| a == b).count() as u64
}

pub fn covariance(seq: &[u16], lag: usize) -> u64 {
    if seq.len() <= lag {
        return 0;
    }
    seq.iter()
        .zip(&seq[lag..])
        .map(|(&a, &b)| u64::from(a) * u64::from(b))
        .sum()
}

/// Length of the bzip2 encoding of the samples written as space-terminated
/// decimal numbers.
pub fn compressed_length(seq: &[u16]) -> u64 {
    let mut text = Vec::with_capacity(seq.len() * 4);
    for &v in seq {
        let mut buf = [0u8; 6];
        let mut k = buf.len();
        let mut x = v;
        loop {
            k -= 1;
            buf[k] = b'0' + (x % 10) as u8;
            x /= 10;
            if x == 0 {
                break;
            }
        }
        text.extend_from_slice(&buf[k..]);
        text.push(b' ');
    }
    let mut enc = bzip2::write::BzEncoder::new(
        Vec::with_capacity(text.len() / 2),
        bzip2::Compression::new(COMPRESSION_LEVEL),
    );
    enc.write_all(&text).expect("in-memory compression");
    enc.finish().expect("in-memory compression").len() as u64
}

/// Conversion I: ones count of each 8-bit block (trailing partial block dropped).
pub fn conversion_one(bits: &[u16]) -> Vec<u16> {
    bits.chunks_exact(8).map(|c| c.iter().sum()).collect()
}

/// Conversion II: each 8-bit block read MSB-first as a byte.
pub fn conversion_two(bits: &[u16]) -> Vec<u16> {
    bits.chunks_exact(8)
        .map(|c| c.iter().fold(0u16, |acc, &b| (acc << 1) | b))
        .collect()
}

/// Ordering-independent facts needed by the statistics.
#[derive(Debug, Clone)]
pub(crate) struct Context {
    pub median: f64,
    pub binary: bool,
}

impl Context {
    pub fn new(seq: &[u16], binary: bool) -> Self {
        Self {
            median: if binary { 0.5 } else { median(seq) },
            binary,
        }
    }
}

/// Evaluate the requested statistics on one ordering, sharing intermediate
/// work between statistics of the same family.
pub(crate) fn evaluate(stats: &[Statistic], seq: &[u16], ctx: &Context) -> Vec<f64> {
    let mut conv1: Option<Vec<u16>> = None;
    let mut conv2: Option<Vec<u16>> = None;
    let mut directional: Option<(u64, u64)> = None;
    let mut median_pair: Option<(u64, u64)> = None;
    let mut collision: Option<(f64, u64)> = None;

    stats
        .iter()
        .map(|&stat| match stat {
            Statistic::Excursion => excursion(seq),
            Statistic::DirectionalRuns
            | Statistic::DirectionalRunLength
            | Statistic::IncreasesDecreases => {
                let view: &[u16] = if ctx.binary {
                    conv1.get_or_insert_with(|| conversion_one(seq))
                } else {
                    seq
                };
                if stat == Statistic::IncreasesDecreases {
                    increases_decreases(view) as f64
                } else {
                    let (count, longest) =
                        *directional.get_or_insert_with(|| directional_runs(view));
                    if stat == Statistic::DirectionalRuns {
                        count as f64
                    } else {
                        longest as f64
                    }
                }
            }
            Statistic::MedianRuns | Statistic::MedianRunLength => {
                let (count, longest) =
                    *median_pair.get_or_insert_with(|| median_runs(seq, ctx.median));
                if stat == Statistic::MedianRuns {
                    count as f64
                } else {
                    longest as f64
                }
            }
            Statistic::AverageCollision | Statistic::MaximumCollision => {
                let (avg, max) = *collision.get_or_insert_with(|| {
                    if ctx.binary {
                        collisions(conv2.get_or_insert_with(|| conversion_two(seq)))
                    } else {
                        collisions(seq)
                    }
                });
                if stat == Statistic::AverageCollision {
                    avg
                } else {
                    max as f64
                }
            }
            Statistic::Periodicity(lag) => periodicity(seq, lag as usize) as f64,
            Statistic::Covariance(lag) => covariance(seq, lag as usize) as f64,
            Statistic::Compression => compressed_length(seq) as f64,
        })
        .collect()
}
