use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::extraction::SymbolStream;
use crate::{Error, Result};

/// Sequential reader over a finite bit stream, most significant bit first.
#[derive(Debug, Clone)]
pub struct RandomSource {
    bytes: Vec<u8>,
    available: u64,
    cursor: u64,
}

impl RandomSource {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let available = bytes.len() as u64 * 8;
        Self {
            bytes,
            available,
            cursor: 0,
        }
    }

    /// Packs the symbols' n-bit words back to back.
    pub fn from_stream(stream: &SymbolStream) -> Self {
        let n = u32::from(stream.n);
        let total = stream.symbols.len() as u64 * u64::from(n);
        let mut bytes = vec![0u8; total.div_ceil(8) as usize];
        let mut pos = 0u64;
        for &s in &stream.symbols {
            for shift in (0..n).rev() {
                if (s >> shift) & 1 == 1 {
                    bytes[(pos / 8) as usize] |= 0x80 >> (pos % 8);
                }
                pos += 1;
            }
        }
        Self {
            bytes,
            available: total,
            cursor: 0,
        }
    }

    /// `len` bytes from a ChaCha20 generator keyed by `seed`.
    pub fn chacha(seed: u64, len: usize) -> Self {
        let mut bytes = vec![0u8; len];
        ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut bytes);
        Self::from_bytes(bytes)
    }

    pub fn consumed(&self) -> u64 {
        self.cursor
    }

    pub fn available(&self) -> u64 {
        self.available
    }

    pub fn remaining(&self) -> u64 {
        self.available - self.cursor
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.cursor >= self.available {
            return Err(self.exhausted());
        }
        let b = self.bytes[(self.cursor / 8) as usize] & (0x80 >> (self.cursor % 8)) != 0;
        self.cursor += 1;
        Ok(b)
    }

    /// Reads `count <= 64` bits as an unsigned integer.
    pub fn read_bits(&mut self, count: u32) -> Result<u64> {
        assert!(count <= 64, "at most 64 bits per read");
        if self.remaining() < u64::from(count) {
            return Err(self.exhausted());
        }
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Ok(v)
    }

    fn exhausted(&self) -> Error {
        Error::Exhausted {
            consumed: self.cursor,
            available: self.available,
        }
    }
}

/// Uniform integer in `[0, m)` by rejection on `ceil(log2 m)`-bit words.
pub fn draw_uniform(src: &mut RandomSource, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::param("draw_uniform needs m >= 1"));
    }
    if m == 1 {
        return Ok(0);
    }
    let width = 64 - (m - 1).leading_zeros();
    loop {
        let w = src.read_bits(width)?;
        if w < m {
            return Ok(w);
        }
    }
}

/// True with probability `p`, comparing uniform bits against the binary
/// expansion of `p` until they differ (two bits expected).
pub fn draw_bernoulli(src: &mut RandomSource, p: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("probability {p} outside [0, 1]")));
    }
    if p == 1.0 {
        return Ok(true);
    }
    let mut frac = p;
    while frac > 0.0 {
        frac *= 2.0;
        let p_bit = frac >= 1.0;
        if p_bit {
            frac -= 1.0;
        }
        let u_bit = src.read_bit()?;
        if u_bit != p_bit {
            return Ok(p_bit);
        }
    }
    Ok(false)
}
