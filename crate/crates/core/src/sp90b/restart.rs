use serde::{Deserialize, Serialize};

use super::binomial::upper_quantile;
use super::dataset::RestartMatrix;
use super::mcv::{min_entropy, MinEntropyEstimate};
use crate::{Error, Result};

/// Sanity-check false-positive rate: `0.01 / (k * (rows + cols))`.
pub fn restart_sanity_alpha(alphabet: usize, rows: usize, cols: usize) -> f64 {
    0.01 / (alphabet as f64 * (rows + cols) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    /// Entropy claim the check is run against, bits per symbol.
    pub h_claim: f64,
    pub alpha: f64,
    /// Largest allowed count of one symbol within a row.
    pub row_cutoff: u64,
    /// Largest allowed count of one symbol within a column.
    pub column_cutoff: u64,
    pub max_row_count: u64,
    pub max_column_count: u64,
    pub sanity_pass: bool,
    pub rows: MinEntropyEstimate,
    pub columns: MinEntropyEstimate,
    /// `min(h_claim, rows, columns)`, bits per symbol.
    pub min_entropy: f64,
    /// Row and column estimates are both at least half the claim.
    pub validation_pass: bool,
}

fn max_symbol_count(values: impl Iterator<Item = u16>, counts: &mut [u64]) -> u64 {
    counts.iter_mut().for_each(|c| *c = 0);
    let mut best = 0;
    for v in values {
        let c = &mut counts[v as usize];
        *c += 1;
        best = best.max(*c);
    }
    best
}

/// Sanity check and row/column estimates for a restart matrix.
pub fn restart_tests(matrix: &RestartMatrix, h_claim: f64) -> Result<RestartOutcome> {
    matrix.validate()?;
    if !(h_claim >= 0.0 && h_claim <= f64::from(matrix.n)) {
        return Err(Error::param(format!(
            "claimed entropy {h_claim} outside [0, {}]",
            matrix.n
        )));
    }
    let k = 1usize << matrix.n;
    let alpha = restart_sanity_alpha(k, matrix.rows, matrix.cols);
    let p = (-h_claim).exp2();
    let row_cutoff = upper_quantile(matrix.cols as u64, p, alpha);
    let column_cutoff = upper_quantile(matrix.rows as u64, p, alpha);

    let mut counts = vec![0u64; k];
    let max_row_count = (0..matrix.rows)
        .map(|r| max_symbol_count(matrix.row(r).iter().copied(), &mut counts))
        .max()
        .unwrap_or(0);
    let max_column_count = (0..matrix.cols)
        .map(|c| {
            max_symbol_count(
                (0..matrix.rows).map(|r| matrix.data[r * matrix.cols + c]),
                &mut counts,
            )
        })
        .max()
        .unwrap_or(0);
    let sanity_pass = max_row_count <= row_cutoff && max_column_count <= column_cutoff;

    let rows = min_entropy(&matrix.row_major())?;
    let columns = min_entropy(&matrix.column_major())?;
    let min_entropy = h_claim.min(rows.min_entropy).min(columns.min_entropy);
    Ok(RestartOutcome {
        h_claim,
        alpha,
        row_cutoff,
        column_cutoff,
        max_row_count,
        max_column_count,
        sanity_pass,
        rows,
        columns,
        min_entropy,
        validation_pass: rows.min_entropy.min(columns.min_entropy) >= h_claim / 2.0,
    })
}
