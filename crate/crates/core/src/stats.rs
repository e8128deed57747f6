//! First-line statistics of a symbol stream.

use serde::{Deserialize, Serialize};

use crate::extraction::{to_bits, SymbolStream};
use crate::{Error, Result};

/// Occurrence count of every symbol of the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolHistogram {
    pub n: u8,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl SymbolHistogram {
    pub fn from_stream(stream: &SymbolStream) -> Self {
        Self::from_symbols(stream.n, &stream.symbols)
    }

    pub fn from_symbols(n: u8, symbols: &[u16]) -> Self {
        let mut counts = vec![0u64; 1usize << n];
        for &s in symbols {
            counts[s as usize] += 1;
        }
        Self {
            n,
            counts,
            total: symbols.len() as u64,
        }
    }

    /// Build from explicit counts. The alphabet size must be `2^n`.
    pub fn from_counts(n: u8, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 1usize << n {
            return Err(Error::param(format!(
                "{} counts given for a {n}-bit alphabet",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(Self { n, counts, total })
    }

    /// Exact merge of two shards of the same alphabet.
    pub fn merge(&mut self, other: &SymbolHistogram) -> Result<()> {
        if self.n != other.n {
            return Err(Error::param("cannot merge histograms of different widths"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub n: u8,
    pub shannon_bits_per_symbol: f64,
    pub shannon_bits_per_bit: f64,
}

/// `H = −Σ p log2 p` over the symbols that occur.
pub fn shannon_entropy(hist: &SymbolHistogram) -> Result<EntropyReport> {
    if hist.total == 0 {
        return Err(Error::InsufficientData {
            what: "shannon entropy",
            needed: 1,
            got: 0,
        });
    }
    let total = hist.total as f64;
    let h: f64 = hist
        .counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    // Rounding can push a uniform histogram a hair above n.
    let h = h.clamp(0.0, f64::from(hist.n));
    Ok(EntropyReport {
        n: hist.n,
        shannon_bits_per_symbol: h,
        shannon_bits_per_bit: h / f64::from(hist.n),
    })
}

/// Distribution of the number of ones in consecutive bit blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOnes {
    pub block_len: usize,
    pub blocks: u64,
    /// `counts[j]` blocks contained exactly `j` ones.
    pub counts: Vec<u64>,
    /// Binomial(block_len, 1/2) probabilities for comparison.
    pub binomial: Vec<f64>,
}

/// Histogram of ones per block of `block_len` bits; a trailing partial block is dropped.
pub fn bit_block_ones(bits: &[u8], block_len: usize) -> Result<BlockOnes> {
    if block_len == 0 {
        return Err(Error::param("block_len must be >= 1"));
    }
    if bits.len() < block_len {
        return Err(Error::InsufficientData {
            what: "bit block statistics",
            needed: block_len,
            got: bits.len(),
        });
    }
    let mut counts = vec![0u64; block_len + 1];
    for block in bits.chunks_exact(block_len) {
        let ones = block.iter().filter(|&&b| b != 0).count();
        counts[ones] += 1;
    }
    Ok(BlockOnes {
        block_len,
        blocks: (bits.len() / block_len) as u64,
        counts,
        binomial: binomial_half_pmf(block_len),
    })
}

/// Binomial(m, 1/2) probabilities, computed in log space.
pub fn binomial_half_pmf(m: usize) -> Vec<f64> {
    (0..=m)
        .map(|j| {
            let ln = statrs::function::factorial::ln_binomial(m as u64, j as u64)
                - m as f64 * std::f64::consts::LN_2;
            ln.exp()
        })
        .collect()
}

/// Row-major 8-bit intensity image built from a symbol stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayscaleMap {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl GrayscaleMap {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.cols + col]
    }

    /// Binary PGM (P5, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Reshape the first `rows·cols` symbols of an 8-bit stream into an image
/// where symbol value `v` becomes intensity `v` (255 is white).
pub fn grayscale_map(stream: &SymbolStream, rows: usize, cols: usize) -> Result<GrayscaleMap> {
    if stream.n != 8 {
        return Err(Error::Unsupported(format!(
            "grayscale maps need 8-bit symbols, stream has n = {}",
            stream.n
        )));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::param("grayscale map needs rows, cols >= 1"));
    }
    let needed = rows * cols;
    if stream.symbols.len() < needed {
        return Err(Error::InsufficientData {
            what: "grayscale map",
            needed,
            got: stream.symbols.len(),
        });
    }
    Ok(GrayscaleMap {
        rows,
        cols,
        pixels: stream.symbols[..needed].iter().map(|&s| s as u8).collect(),
    })
}

/// Pairs `(x_t, x_{t+lag})`.
pub fn lag_pairs(stream: &SymbolStream, lag: usize) -> Result<Vec<(u16, u16)>> {
    if lag == 0 {
        return Err(Error::param("lag must be >= 1"));
    }
    let s = &stream.symbols;
    if s.len() <= lag {
        return Err(Error::InsufficientData {
            what: "lag pairs",
            needed: lag + 1,
            got: s.len(),
        });
    }
    Ok(s.iter().zip(&s[lag..]).map(|(&a, &b)| (a, b)).collect())
}

/// First differences `x_{t+1} − x_t`.
pub fn difference_series(stream: &SymbolStream) -> Result<Vec<i32>> {
    let s = &stream.symbols;
    if s.len() < 2 {
        return Err(Error::InsufficientData {
            what: "difference series",
            needed: 2,
            got: s.len(),
        });
    }
    Ok(s.windows(2)
        .map(|w| i32::from(w[1]) - i32::from(w[0]))
        .collect())
}

/// Pearson correlation of a paired sample; `None` when either side is constant.
pub fn pearson(pairs: &[(u16, u16)]) -> Option<f64> {
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return None;
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(x, y) in pairs {
        sx += f64::from(x);
        sy += f64::from(y);
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let dx = f64::from(x) - mx;
        let dy = f64::from(y) - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        None
    } else {
        Some(cov / (vx * vy).sqrt())
    }
}

/// Summary written by `analyze stats`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub schema_version: u32,
    pub symbols: u64,
    pub entropy: EntropyReport,
    pub histogram: SymbolHistogram,
    pub block_ones: Option<BlockOnes>,
    pub lag1_correlation: Option<f64>,
}

pub fn stats_report(stream: &SymbolStream, block_len: usize) -> Result<StatsReport> {
    let histogram = SymbolHistogram::from_stream(stream);
    let entropy = shannon_entropy(&histogram)?;
    let bits = to_bits(stream);
    let block_ones = if bits.len() >= block_len {
        Some(bit_block_ones(&bits, block_len)?)
    } else {
        None
    };
    let lag1_correlation = lag_pairs(stream, 1).ok().and_then(|p| pearson(&p));
    Ok(StatsReport {
        schema_version: 1,
        symbols: stream.symbols.len() as u64,
        entropy,
        histogram,
        block_ones,
        lag1_correlation,
    })
}
