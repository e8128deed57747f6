//! From voltage trace to random symbols.
//!
//! The trace is high-pass filtered to strip the DC level, edges are detected
//! by thresholding the filtered signal, and each edge is mapped to the index
//! of the time bin it falls in. Time is cut into repeating blocks of `2^n`
//! bins starting at `t = 0`; a block holding exactly one edge yields one
//! n-bit symbol.

use serde::{Deserialize, Serialize};

use crate::device::VoltageTrace;
use crate::{Error, Result};

/// Largest supported symbol width.
pub const MAX_SYMBOL_BITS: u8 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Rise,
    Fall,
}

/// Detected edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTrain {
    /// Event instants in seconds, strictly increasing.
    pub times: Vec<f64>,
    pub polarities: Vec<Polarity>,
    /// Sample period of the trace the events came from.
    pub source_dt: f64,
    /// Time span covered by the source trace.
    pub duration: f64,
}

impl EventTrain {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// n-bit time-bin indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolStream {
    pub n: u8,
    pub symbols: Vec<u16>,
    /// Blocks discarded because they held two or more events.
    #[serde(default)]
    pub dropped_blocks: u64,
    /// Complete blocks with no event.
    #[serde(default)]
    pub empty_blocks: u64,
}

impl SymbolStream {
    /// Build a stream from raw symbols, checking every value fits in `n` bits.
    pub fn new(n: u8, symbols: Vec<u16>) -> Result<Self> {
        check_width(n)?;
        let limit = 1u32 << n;
        if let Some(i) = symbols.iter().position(|&s| u32::from(s) >= limit) {
            return Err(Error::param(format!(
                "symbol {} at index {i} does not fit in {n} bits",
                symbols[i]
            )));
        }
        Ok(Self {
            n,
            symbols,
            dropped_blocks: 0,
            empty_blocks: 0,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        1usize << self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

pub(crate) fn check_width(n: u8) -> Result<()> {
    if (1..=MAX_SYMBOL_BITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::param(format!(
            "symbol width must be in 1..={MAX_SYMBOL_BITS}, got {n}"
        )))
    }
}

/// One-pole high-pass with corner frequency `cutoff`.
///
/// `y[k] = α (y[k−1] + x[k] − x[k−1])` with `α = RC / (RC + dt)` and
/// `RC = 1 / (2π · cutoff)`. The input is taken to have been constant at
/// `x[0]` before the trace starts, so a constant trace maps to all zeros.
pub fn highpass(trace: &VoltageTrace, cutoff: f64) -> Result<VoltageTrace> {
    trace.validate()?;
    let nyquist = 0.5 / trace.dt;
    if !(cutoff > 0.0 && cutoff < nyquist) {
        return Err(Error::param(format!(
            "high-pass cutoff must be in (0, {nyquist}) Hz, got {cutoff}"
        )));
    }
    let rc = 1.0 / (2.0 * std::f64::consts::PI * cutoff);
    let alpha = rc / (rc + trace.dt);
    let mut out = Vec::with_capacity(trace.samples.len());
    let mut prev_x = trace.samples[0];
    let mut y = 0.0;
    for &x in &trace.samples {
        y = alpha * (y + x - prev_x);
        prev_x = x;
        out.push(y);
    }
    VoltageTrace::new(out, trace.dt, trace.meta.clone())
}

/// Threshold edge detector for a high-pass filtered trace.
///
/// An event fires at the first sample of an excursion with
/// `|v| ≥ threshold`, polarity taken from the sign. The detector re-arms
/// once the signal falls below `threshold / 2` or crosses the threshold with
/// the opposite sign. Events closer than `dead_time` to the previous event
/// are suppressed.
pub fn detect_edges(trace: &VoltageTrace, threshold: f64, dead_time: f64) -> Result<EventTrain> {
    trace.validate()?;
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::param(format!(
            "threshold must be > 0, got {threshold}"
        )));
    }
    if !(dead_time >= 0.0) || !dead_time.is_finite() {
        return Err(Error::param(format!(
            "dead_time must be >= 0, got {dead_time}"
        )));
    }
    let rearm = 0.5 * threshold;
    let mut times = Vec::new();
    let mut polarities = Vec::new();
    let mut active: Option<Polarity> = None;
    let mut last: Option<usize> = None;
    for (k, &v) in trace.samples.iter().enumerate() {
        if v.abs() >= threshold {
            let pol = if v > 0.0 {
                Polarity::Rise
            } else {
                Polarity::Fall
            };
            if active == Some(pol) {
                continue;
            }
            active = Some(pol);
            let blocked = last.is_some_and(|l| ((k - l) as f64) * trace.dt < dead_time);
            if !blocked {
                times.push(k as f64 * trace.dt);
                polarities.push(pol);
                last = Some(k);
            }
        } else if v.abs() < rearm {
            active = None;
        }
    }
    Ok(EventTrain {
        times,
        polarities,
        source_dt: trace.dt,
        duration: trace.duration(),
    })
}

/// Index of the bin containing `t`, robust to representation error when
/// `t` is an exact multiple of `bin_width`.
fn bin_index(t: f64, bin_width: f64) -> u64 {
    let x = t / bin_width;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}

/// Map events to n-bit time-bin indices.
///
/// Blocks are `2^n · bin_width` long. A block with exactly one event emits
/// that event's bin index, empty blocks emit nothing, and blocks with two or
/// more events are discarded and counted. The trailing partial block of the
/// trace is ignored.
pub fn symbolize(events: &EventTrain, bin_width: f64, n: u8) -> Result<SymbolStream> {
    check_width(n)?;
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::param(format!(
            "bin_width must be > 0, got {bin_width}"
        )));
    }
    let bins_per_block = 1u64 << n;
    let block_len = bin_width * bins_per_block as f64;
    let total_blocks = bin_index(events.duration, block_len);

    let mut symbols = Vec::new();
    let mut dropped = 0u64;
    let mut current: Option<(u64, u64, u16)> = None; // (block, events, symbol)
    let mut flush = |cur: Option<(u64, u64, u16)>, symbols: &mut Vec<u16>| {
        if let Some((_, count, sym)) = cur {
            if count == 1 {
                symbols.push(sym);
            } else {
                dropped += 1;
            }
        }
    };
    for &t in &events.times {
        let bin = bin_index(t, bin_width);
        let block = bin >> n;
        if block >= total_blocks {
            break;
        }
        let sym = (bin & (bins_per_block - 1)) as u16;
        match current {
            Some((b, ref mut count, _)) if b == block => *count += 1,
            _ => {
                flush(current, &mut symbols);
                current = Some((block, 1, sym));
            }
        }
    }
    flush(current, &mut symbols);
    let occupied = symbols.len() as u64 + dropped;
    Ok(SymbolStream {
        n,
        symbols,
        dropped_blocks: dropped,
        empty_blocks: total_blocks - occupied,
    })
}

/// Expand symbols to bits, most significant bit first. Each output byte is 0 or 1.
pub fn to_bits(stream: &SymbolStream) -> Vec<u8> {
    let n = stream.n as usize;
    let mut bits = Vec::with_capacity(n * stream.symbols.len());
    for &s in &stream.symbols {
        for shift in (0..n).rev() {
            bits.push(((s >> shift) & 1) as u8);
        }
    }
    bits
}

/// Regroup an MSB-first bit sequence into n-bit symbols.
pub fn from_bits(bits: &[u8], n: u8) -> Result<SymbolStream> {
    check_width(n)?;
    let n_us = n as usize;
    if bits.len() % n_us != 0 {
        return Err(Error::param(format!(
            "{} bits is not a multiple of the symbol width {n}",
            bits.len()
        )));
    }
    let mut symbols = Vec::with_capacity(bits.len() / n_us);
    for chunk in bits.chunks(n_us) {
        let mut v = 0u16;
        for &b in chunk {
            if b > 1 {
                return Err(Error::param(format!("bit value {b} is not 0 or 1")));
            }
            v = (v << 1) | u16::from(b);
        }
        symbols.push(v);
    }
    SymbolStream::new(n, symbols)
}

/// Knobs of the full trace-to-symbols procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionParams {
    /// Symbol width in bits.
    pub n: u8,
    /// Bin width in seconds. `None` means one sample period.
    pub bin_width: Option<f64>,
    /// High-pass corner in Hz. `None` means `fs / 20`.
    pub cutoff: Option<f64>,
    /// Detection threshold in volts. `None` means 4σ of the filtered noise floor.
    pub threshold: Option<f64>,
    /// Dead time in seconds. `None` means two sample periods.
    pub dead_time: Option<f64>,
    /// Leading samples used to estimate the noise floor.
    pub noise_head: usize,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        Self {
            n: 8,
            bin_width: None,
            cutoff: None,
            threshold: None,
            dead_time: None,
            noise_head: 1 << 16,
        }
    }
}

/// Settings actually used by [`extract`], after defaults were resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedExtraction {
    pub n: u8,
    pub bin_width: f64,
    pub cutoff: f64,
    pub threshold: f64,
    pub dead_time: f64,
    pub events: usize,
}

/// Robust noise-floor threshold: four times the MAD-based standard deviation
/// of the first `head` filtered samples. Falls back to a quarter of the peak
/// magnitude for noiseless traces.
pub fn estimate_threshold(filtered: &VoltageTrace, head: usize) -> f64 {
    let take = head.clamp(1, filtered.samples.len());
    let mut abs: Vec<f64> = filtered.samples[..take].iter().map(|v| v.abs()).collect();
    let mid = abs.len() / 2;
    let (_, median, _) = abs.select_nth_unstable_by(mid, f64::total_cmp);
    let sigma = 1.4826 * *median;
    if sigma > 0.0 {
        4.0 * sigma
    } else {
        let peak = filtered.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak > 0.0 {
            0.25 * peak
        } else {
            f64::MIN_POSITIVE
        }
    }
}

/// Full extraction: high-pass, edge detection, symbolization.
pub fn extract(
    trace: &VoltageTrace,
    params: &ExtractionParams,
) -> Result<(SymbolStream, ResolvedExtraction)> {
    trace.validate()?;
    let fs = trace.sample_rate();
    let cutoff = params.cutoff.unwrap_or(fs / 20.0);
    let bin_width = params.bin_width.unwrap_or(trace.dt);
    let dead_time = params.dead_time.unwrap_or(2.0 * trace.dt);
    let filtered = highpass(trace, cutoff)?;
    let threshold = params
        .threshold
        .unwrap_or_else(|| estimate_threshold(&filtered, params.noise_head));
    let events = detect_edges(&filtered, threshold, dead_time)?;
    let stream = symbolize(&events, bin_width, params.n)?;
    Ok((
        stream,
        ResolvedExtraction {
            n: params.n,
            bin_width,
            cutoff,
            threshold,
            dead_time,
            events: events.len(),
        },
    ))
}
