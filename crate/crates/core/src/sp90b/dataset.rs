use crate::extraction::{check_width, SymbolStream};
use crate::{Error, Result};

/// Sample count of a conforming sequential dataset.
pub const SEQUENTIAL_SAMPLES: usize = 1_000_000;
/// Rows and columns of a conforming restart matrix.
pub const RESTART_SIDE: usize = 1000;

/// Symbols under assessment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub samples: Vec<u16>,
    /// Bits per symbol.
    pub n: u8,
}

impl Dataset {
    pub fn new(samples: Vec<u16>, n: u8) -> Result<Self> {
        let stream = SymbolStream::new(n, samples)?;
        Ok(Self {
            samples: stream.symbols,
            n,
        })
    }

    pub fn from_stream(stream: &SymbolStream) -> Self {
        Self {
            samples: stream.symbols.clone(),
            n: stream.n,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        1usize << self.n
    }

    pub fn is_binary(&self) -> bool {
        self.n == 1
    }

    pub fn is_conformant(&self) -> bool {
        self.samples.len() >= SEQUENTIAL_SAMPLES
    }
}

/// One row per restart of the source, `cols` samples each, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestartMatrix {
    pub rows: usize,
    pub cols: usize,
    pub n: u8,
    pub data: Vec<u16>,
}

impl RestartMatrix {
    pub fn new(rows: usize, cols: usize, n: u8, data: Vec<u16>) -> Result<Self> {
        let m = Self {
            rows,
            cols,
            n,
            data,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check_width(self.n)?;
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::param(
                "restart matrix needs at least one row and column",
            ));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::param(format!(
                "restart matrix is {}x{} but holds {} samples",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        let limit = 1u32 << self.n;
        if self.data.iter().any(|&s| u32::from(s) >= limit) {
            return Err(Error::param(format!(
                "restart data exceeds {} bits",
                self.n
            )));
        }
        Ok(())
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u16> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols + c])
            .collect()
    }

    pub fn row_major(&self) -> Dataset {
        Dataset {
            samples: self.data.clone(),
            n: self.n,
        }
    }

    pub fn column_major(&self) -> Dataset {
        let mut samples = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                samples.push(self.data[r * self.cols + c]);
            }
        }
        Dataset { samples, n: self.n }
    }

    pub fn is_conformant(&self) -> bool {
        self.rows == RESTART_SIDE && self.cols == RESTART_SIDE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_serialisations() {
        let m = RestartMatrix::new(2, 3, 4, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(m.row(1), &[4, 5, 6]);
        assert_eq!(m.column(2), vec![3, 6]);
        assert_eq!(m.column_major().samples, vec![1, 4, 2, 5, 3, 6]);
        assert!(!m.is_conformant());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(RestartMatrix::new(2, 3, 4, vec![1; 5]).is_err());
        assert!(RestartMatrix::new(2, 2, 2, vec![1, 2, 3, 4]).is_err());
        assert!(Dataset::new(vec![2], 1).is_err());
    }
}
