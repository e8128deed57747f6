//! Continuous health tests: repetition count and adaptive proportion.

use serde::{Deserialize, Serialize};

use super::binomial::upper_quantile;
use crate::{Error, Result};

/// Default false-positive probability, 2^-20.
pub const DEFAULT_ALPHA: f64 = 1.0 / 1_048_576.0;
/// Adaptive proportion window for non-binary sources.
pub const DEFAULT_WINDOW: usize = 512;
/// Adaptive proportion window for binary sources.
pub const BINARY_WINDOW: usize = 1024;

fn check_entropy(h_min: f64) -> Result<()> {
    if !(h_min > 0.0 && h_min.is_finite()) {
        return Err(Error::param(format!("h_min must be positive, got {h_min}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// `C = 1 + ceil(-log2(alpha) / h_min)`.
pub fn repetition_count_cutoff(h_min: f64, alpha: f64) -> Result<u64> {
    check_entropy(h_min)?;
    check_alpha(alpha)?;
    Ok(1 + (-alpha.log2() / h_min).ceil() as u64)
}

/// `C = 1 + CRITBINOM(W, 2^-h_min, 1 - alpha)`.
pub fn adaptive_proportion_cutoff(h_min: f64, window: usize, alpha: f64) -> Result<u64> {
    check_entropy(h_min)?;
    check_alpha(alpha)?;
    if window < 2 {
        return Err(Error::param(format!(
            "window must be at least 2, got {window}"
        )));
    }
    Ok(1 + upper_quantile(window as u64, (-h_min).exp2(), alpha))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionCountTest {
    pub cutoff: u64,
    last: Option<u16>,
    run: u64,
}

impl RepetitionCountTest {
    pub fn new(cutoff: u64) -> Self {
        Self {
            cutoff,
            last: None,
            run: 0,
        }
    }

    /// Feeds one sample; true when the current run has just reached the cutoff.
    pub fn feed(&mut self, symbol: u16) -> bool {
        if self.last == Some(symbol) {
            self.run += 1;
        } else {
            self.last = Some(symbol);
            self.run = 1;
        }
        self.run == self.cutoff
    }

    pub fn reset(&mut self) {
        self.last = None;
        self.run = 0;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptiveProportionTest {
    pub cutoff: u64,
    pub window: usize,
    reference: u16,
    position: usize,
    count: u64,
}

impl AdaptiveProportionTest {
    pub fn new(cutoff: u64, window: usize) -> Self {
        Self {
            cutoff,
            window,
            reference: 0,
            position: 0,
            count: 0,
        }
    }

    /// Feeds one sample; true when the reference count of the current
    /// window has just reached the cutoff.
    pub fn feed(&mut self, symbol: u16) -> bool {
        if self.position == 0 {
            self.reference = symbol;
            self.count = 0;
        }
        let mut alarm = false;
        if symbol == self.reference {
            self.count += 1;
            alarm = self.count == self.cutoff;
        }
        self.position += 1;
        if self.position == self.window {
            self.position = 0;
        }
        alarm
    }

    pub fn reset(&mut self) {
        self.position = 0;
        self.count = 0;
    }
}

/// Alarm positions from a pass of both tests over a stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthReport {
    pub h_min: f64,
    pub alpha: f64,
    pub samples: u64,
    pub repetition_cutoff: u64,
    pub proportion_cutoff: u64,
    pub window: usize,
    pub repetition_alarms: Vec<u64>,
    pub proportion_alarms: Vec<u64>,
}

/// Both tests fed in lockstep.
#[derive(Debug, Clone)]
pub struct HealthMonitor {
    pub repetition: RepetitionCountTest,
    pub proportion: AdaptiveProportionTest,
    h_min: f64,
    alpha: f64,
    position: u64,
    repetition_alarms: Vec<u64>,
    proportion_alarms: Vec<u64>,
}

impl HealthMonitor {
    pub fn new(h_min: f64, window: usize, alpha: f64) -> Result<Self> {
        Ok(Self {
            repetition: RepetitionCountTest::new(repetition_count_cutoff(h_min, alpha)?),
            proportion: AdaptiveProportionTest::new(
                adaptive_proportion_cutoff(h_min, window, alpha)?,
                window,
            ),
            h_min,
            alpha,
            position: 0,
            repetition_alarms: Vec::new(),
            proportion_alarms: Vec::new(),
        })
    }

    pub fn feed(&mut self, symbol: u16) {
        if self.repetition.feed(symbol) {
            self.repetition_alarms.push(self.position);
        }
        if self.proportion.feed(symbol) {
            self.proportion_alarms.push(self.position);
        }
        self.position += 1;
    }

    pub fn feed_all(&mut self, symbols: &[u16]) {
        symbols.iter().for_each(|&s| self.feed(s));
    }

    pub fn report(&self) -> HealthReport {
        HealthReport {
            h_min: self.h_min,
            alpha: self.alpha,
            samples: self.position,
            repetition_cutoff: self.repetition.cutoff,
            proportion_cutoff: self.proportion.cutoff,
            window: self.proportion.window,
            repetition_alarms: self.repetition_alarms.clone(),
            proportion_alarms: self.proportion_alarms.clone(),
        }
    }
}

/// Positions (0-based) at which a run reaches the repetition cutoff.
pub fn repetition_count_health(stream: &[u16], h_min: f64, alpha: f64) -> Result<Vec<u64>> {
    let mut t = RepetitionCountTest::new(repetition_count_cutoff(h_min, alpha)?);
    Ok(stream
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| t.feed(s).then_some(i as u64))
        .collect())
}

/// Positions (0-based) at which a window's reference count reaches the cutoff.
pub fn adaptive_proportion_health(
    stream: &[u16],
    h_min: f64,
    window: usize,
    alpha: f64,
) -> Result<Vec<u64>> {
    let mut t =
        AdaptiveProportionTest::new(adaptive_proportion_cutoff(h_min, window, alpha)?, window);
    Ok(stream
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| t.feed(s).then_some(i as u64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_cutoff_formula() {
        assert_eq!(repetition_count_cutoff(1.0, DEFAULT_ALPHA).unwrap(), 21);
        assert_eq!(repetition_count_cutoff(4.0, DEFAULT_ALPHA).unwrap(), 6);
        assert_eq!(repetition_count_cutoff(7.86, DEFAULT_ALPHA).unwrap(), 4);
        assert!(repetition_count_cutoff(0.0, DEFAULT_ALPHA).is_err());
    }

    #[test]
    fn repetition_boundary() {
        let mut s = vec![1u16; 20];
        s.push(2);
        assert!(repetition_count_health(&s, 1.0, DEFAULT_ALPHA)
            .unwrap()
            .is_empty());
        let s = vec![0u16; 21];
        assert_eq!(
            repetition_count_health(&s, 1.0, DEFAULT_ALPHA).unwrap(),
            vec![20]
        );
    }

    #[test]
    fn alternating_never_alarms() {
        let s: Vec<u16> = (0..10_000).map(|i| (i % 2) as u16).collect();
        assert!(repetition_count_health(&s, 8.0, DEFAULT_ALPHA)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn stuck_source_alarms_in_first_window() {
        let s = vec![9u16; 2000];
        let alarms = adaptive_proportion_health(&s, 7.86, DEFAULT_WINDOW, DEFAULT_ALPHA).unwrap();
        assert!(!alarms.is_empty());
        assert!(alarms[0] < DEFAULT_WINDOW as u64);
    }

    #[test]
    fn proportion_boundary() {
        let c = adaptive_proportion_cutoff(7.86, DEFAULT_WINDOW, DEFAULT_ALPHA).unwrap();
        // Reference appears c-1 times in the window, everything else is distinct noise.
        let mut w: Vec<u16> = (0..DEFAULT_WINDOW as u16).map(|i| 1 + i % 200).collect();
        w[0] = 0;
        for k in 1..(c as usize - 1) {
            w[k * 3] = 0;
        }
        let count = w.iter().filter(|&&s| s == 0).count() as u64;
        assert_eq!(count, c - 1);
        let mut t = AdaptiveProportionTest::new(c, DEFAULT_WINDOW);
        assert!(w.iter().all(|&s| !t.feed(s)));
    }

    #[test]
    fn monitor_matches_standalone() {
        let s: Vec<u16> = [vec![5u16; 30], (0..600).map(|i| (i % 7) as u16).collect()].concat();
        let mut m = HealthMonitor::new(1.0, 64, DEFAULT_ALPHA).unwrap();
        m.feed_all(&s);
        let r = m.report();
        assert_eq!(
            r.repetition_alarms,
            repetition_count_health(&s, 1.0, DEFAULT_ALPHA).unwrap()
        );
        assert_eq!(
            r.proportion_alarms,
            adaptive_proportion_health(&s, 1.0, 64, DEFAULT_ALPHA).unwrap()
        );
    }
}
