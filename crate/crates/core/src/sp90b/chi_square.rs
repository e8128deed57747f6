use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::dataset::Dataset;
use super::substring::longest_repeat_length;
use crate::{Error, Result};

/// A chi-square or repeated-substring test fails below this p-value.
pub const CHI_SQUARE_SIGNIFICANCE: f64 = 0.001;
/// Fewest samples on which the tests are run.
pub const MIN_CHI_SQUARE_SAMPLES: usize = 100;

const MIN_BIN_EXPECTATION: f64 = 5.0;
const GOF_PARTS: usize = 10;
const MAX_BINARY_TUPLE: u32 = 11;
const MAX_PAIR_BINS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareOutcome {
    pub name: String,
    /// Chi-square statistic, or the repeated-substring length.
    pub statistic: f64,
    pub degrees_of_freedom: Option<u64>,
    /// p-value, or the collision probability for the substring test.
    pub p_value: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ChiSquareOutcome {
    fn from_statistic(name: &str, t: f64, df: u64) -> Self {
        let p_value = survival(t, df);
        Self {
            name: name.into(),
            statistic: t,
            degrees_of_freedom: Some(df),
            p_value,
            pass: p_value >= CHI_SQUARE_SIGNIFICANCE,
            note: None,
        }
    }

    fn trivial(name: &str, pass: bool, note: &str) -> Self {
        Self {
            name: name.into(),
            statistic: 0.0,
            degrees_of_freedom: None,
            p_value: if pass { 1.0 } else { 0.0 },
            pass,
            note: Some(note.into()),
        }
    }
}

fn survival(t: f64, df: u64) -> f64 {
    ChiSquared::new(df as f64)
        .map(|d| d.sf(t))
        .unwrap_or(f64::NAN)
}

fn check_len(data: &Dataset) -> Result<()> {
    if data.len() < MIN_CHI_SQUARE_SAMPLES {
        return Err(Error::InsufficientData {
            what: "chi-square tests",
            needed: MIN_CHI_SQUARE_SAMPLES,
            got: data.len(),
        });
    }
    Ok(())
}

fn symbol_counts(samples: &[u16]) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << 16];
    for &s in samples {
        counts[s as usize] += 1;
    }
    counts
}

const INDEPENDENCE: &str = "Chi-Square Independence";
const GOODNESS_OF_FIT: &str = "Chi-Square Goodness of Fit";
const LRS: &str = "Length of the Longest Repeated Substring";

/// Independence test: overlapping pairs for non-binary data, m-bit tuples
/// for binary data.
pub fn independence(data: &Dataset) -> Result<ChiSquareOutcome> {
    check_len(data)?;
    if data.is_binary() {
        binary_independence(&data.samples)
    } else {
        pair_independence(&data.samples)
    }
}

fn pair_independence(s: &[u16]) -> Result<ChiSquareOutcome> {
    let len = s.len() as f64;
    let counts = symbol_counts(s);
    let seen: Vec<(u16, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(v, &c)| (v as u16, c as f64 / len))
        .collect();
    if seen.len() < 2 {
        return Ok(ChiSquareOutcome::trivial(
            INDEPENDENCE,
            false,
            "single symbol value",
        ));
    }
    if seen.len() * seen.len() > MAX_PAIR_BINS {
        return Err(Error::Unsupported(format!(
            "independence test over {} distinct symbols",
            seen.len()
        )));
    }
    let k = seen.len();
    let mut slot = vec![usize::MAX; 1 << 16];
    for (i, &(v, _)) in seen.iter().enumerate() {
        slot[v as usize] = i;
    }
    let mut observed = vec![0u64; k * k];
    for w in s.windows(2) {
        observed[slot[w[0] as usize] * k + slot[w[1] as usize]] += 1;
    }
    let mut cells: Vec<(f64, u64)> = (0..k * k)
        .map(|c| (seen[c / k].1 * seen[c % k].1 * (len - 1.0), observed[c]))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut bins: Vec<(f64, u64)> = Vec::new();
    let mut acc = (0.0, 0u64);
    for (e, o) in cells {
        acc.0 += e;
        acc.1 += o;
        if acc.0 >= MIN_BIN_EXPECTATION {
            bins.push(acc);
            acc = (0.0, 0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    if bins.len() < 2 {
        return Ok(ChiSquareOutcome::trivial(
            INDEPENDENCE,
            true,
            "too few samples for two bins; not applicable",
        ));
    }
    let t: f64 = bins.iter().map(|&(e, o)| (o as f64 - e).powi(2) / e).sum();
    Ok(ChiSquareOutcome::from_statistic(
        INDEPENDENCE,
        t,
        bins.len() as u64 - 1,
    ))
}

fn binary_independence(s: &[u16]) -> Result<ChiSquareOutcome> {
    let len = s.len();
    let ones = s.iter().filter(|&&b| b == 1).count() as f64;
    let p1 = ones / len as f64;
    let p0 = 1.0 - p1;
    let pmin = p0.min(p1);
    if pmin == 0.0 {
        return Ok(ChiSquareOutcome::trivial(
            INDEPENDENCE,
            false,
            "single symbol value",
        ));
    }
    let mut m = 0u32;
    for cand in (1..=MAX_BINARY_TUPLE).rev() {
        if pmin.powi(cand as i32) * (len / cand as usize) as f64 >= MIN_BIN_EXPECTATION {
            m = cand;
            break;
        }
    }
    if m < 2 {
        return Ok(ChiSquareOutcome::trivial(
            INDEPENDENCE,
            true,
            "too few samples for two-bit tuples; not applicable",
        ));
    }
    let blocks = len / m as usize;
    let mut observed = vec![0u64; 1 << m];
    for chunk in s.chunks_exact(m as usize) {
        let v = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        observed[v] += 1;
    }
    let t: f64 = observed
        .iter()
        .enumerate()
        .map(|(v, &o)| {
            let w = (v as u32).count_ones() as i32;
            let e = p1.powi(w) * p0.powi(m as i32 - w) * blocks as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    Ok(ChiSquareOutcome::from_statistic(
        INDEPENDENCE,
        t,
        (1u64 << m) - 2,
    ))
}

/// Goodness-of-fit test across ten equal slices of the data.
pub fn goodness_of_fit(data: &Dataset) -> Result<ChiSquareOutcome> {
    check_len(data)?;
    let part = data.len() / GOF_PARTS;
    let used = &data.samples[..part * GOF_PARTS];
    let counts = symbol_counts(used);
    if data.is_binary() {
        let p1 = counts[1] as f64 / used.len() as f64;
        let e = [(1.0 - p1) * part as f64, p1 * part as f64];
        if e[0] == 0.0 || e[1] == 0.0 {
            return Ok(ChiSquareOutcome::trivial(
                GOODNESS_OF_FIT,
                true,
                "single symbol value",
            ));
        }
        let mut t = 0.0;
        for chunk in used.chunks_exact(part) {
            let o1 = chunk.iter().filter(|&&b| b == 1).count() as f64;
            let o = [part as f64 - o1, o1];
            t += (0..2).map(|i| (o[i] - e[i]).powi(2) / e[i]).sum::<f64>();
        }
        return Ok(ChiSquareOutcome::from_statistic(
            GOODNESS_OF_FIT,
            t,
            (GOF_PARTS - 1) as u64,
        ));
    }

    // Bin index per symbol: listed symbols get their own bin, the rest share one.
    let expected: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / GOF_PARTS as f64)
        .collect();
    let mut bin_of = vec![usize::MAX; 1 << 16];
    let mut bin_expect: Vec<f64> = Vec::new();
    let mut other = 0.0;
    for (v, &e) in expected.iter().enumerate() {
        if e >= MIN_BIN_EXPECTATION {
            bin_of[v] = bin_expect.len();
            bin_expect.push(e);
        } else if e > 0.0 {
            other += e;
        }
    }
    let pooled = bin_expect.len();
    if other > 0.0 {
        if other < MIN_BIN_EXPECTATION && !bin_expect.is_empty() {
            // Fold the undersized pooled bin into the smallest listed bin.
            let (smallest, _) = bin_expect
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty");
            bin_expect[smallest] += other;
            for (v, &e) in expected.iter().enumerate() {
                if e > 0.0 && bin_of[v] == usize::MAX {
                    bin_of[v] = smallest;
                }
            }
        } else {
            bin_expect.push(other);
            for (v, &e) in expected.iter().enumerate() {
                if e > 0.0 && bin_of[v] == usize::MAX {
                    bin_of[v] = pooled;
                }
            }
        }
    }
    let q = bin_expect.len();
    if q < 2 {
        return Ok(ChiSquareOutcome::trivial(
            GOODNESS_OF_FIT,
            true,
            "fewer than two bins; not applicable",
        ));
    }
    let mut t = 0.0;
    let mut observed = vec![0u64; q];
    for chunk in used.chunks_exact(part) {
        observed.iter_mut().for_each(|o| *o = 0);
        for &s in chunk {
            observed[bin_of[s as usize]] += 1;
        }
        t += observed
            .iter()
            .zip(&bin_expect)
            .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
            .sum::<f64>();
    }
    Ok(ChiSquareOutcome::from_statistic(
        GOODNESS_OF_FIT,
        t,
        ((GOF_PARTS - 1) * (q - 1)) as u64,
    ))
}

/// Longest repeated substring test: fails when a repeat of the observed
/// length is improbable under the collision probability of the data.
pub fn longest_repeated_substring(data: &Dataset) -> Result<ChiSquareOutcome> {
    check_len(data)?;
    let len = data.len() as f64;
    let mut counts = vec![0u64; data.alphabet_size()];
    for &s in &data.samples {
        counts[s as usize] += 1;
    }
    let p_col: f64 = counts.iter().map(|&c| (c as f64 / len).powi(2)).sum();
    let w = longest_repeat_length(&data.samples);
    let substrings = len - w as f64 + 1.0;
    let pairs = substrings * (substrings - 1.0) / 2.0;
    let p_w = p_col.powi(w as i32);
    let prob = if p_w >= 1.0 {
        1.0
    } else {
        -f64::exp_m1(pairs * f64::ln_1p(-p_w))
    };
    Ok(ChiSquareOutcome {
        name: LRS.into(),
        statistic: w as f64,
        degrees_of_freedom: None,
        p_value: prob,
        pass: prob >= CHI_SQUARE_SIGNIFICANCE,
        note: None,
    })
}

/// Independence, goodness-of-fit and repeated-substring tests in that order.
pub fn chi_square_tests(data: &Dataset) -> Result<Vec<ChiSquareOutcome>> {
    Ok(vec![
        independence(data)?,
        goodness_of_fit(data)?,
        longest_repeated_substring(data)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(len: usize, n: u8, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Dataset::new(
            (0..len).map(|_| rng.random_range(0..1u16 << n)).collect(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn too_short_names_minimum() {
        let d = uniform(50, 8, 0);
        match chi_square_tests(&d) {
            Err(Error::InsufficientData { needed, .. }) => {
                assert_eq!(needed, MIN_CHI_SQUARE_SAMPLES)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uniform_bytes_pass() {
        let d = uniform(200_000, 8, 1);
        for o in chi_square_tests(&d).unwrap() {
            assert!(o.pass, "{o:?}");
        }
    }

    #[test]
    fn uniform_bits_pass() {
        let d = uniform(100_000, 1, 2);
        for o in chi_square_tests(&d).unwrap() {
            assert!(o.pass, "{o:?}");
        }
    }

    #[test]
    fn constant_fails_independence() {
        let d = Dataset::new(vec![3; 1000], 8).unwrap();
        assert!(!independence(&d).unwrap().pass);
        let bits = Dataset::new(vec![1; 1000], 1).unwrap();
        assert!(!independence(&bits).unwrap().pass);
    }

    #[test]
    fn periodic_fails_repeated_substring() {
        let d = Dataset::new([0u16, 1].repeat(5000), 8).unwrap();
        let o = longest_repeated_substring(&d).unwrap();
        assert_eq!(o.statistic, 9998.0);
        assert!(!o.pass);
    }

    #[test]
    fn correlated_pairs_fail_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v = Vec::new();
        for _ in 0..20_000 {
            let x = rng.random_range(0..16u16);
            v.push(x);
            v.push(x);
        }
        let d = Dataset::new(v, 4).unwrap();
        assert!(!independence(&d).unwrap().pass);
    }

    #[test]
    fn drifting_distribution_fails_goodness_of_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v: Vec<u16> = (0..100_000)
            .map(|i| {
                if i < 50_000 {
                    rng.random_range(0..8)
                } else {
                    rng.random_range(8..16)
                }
            })
            .collect();
        let d = Dataset::new(v, 4).unwrap();
        assert!(!goodness_of_fit(&d).unwrap().pass);
    }
}
