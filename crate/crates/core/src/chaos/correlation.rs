use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embed::{embed, EmbeddedSeries};
use crate::{Error, Result};

/// Rows per parallel work item; fixed so the reduction tree does not depend
/// on the worker count (the sums are integers, so it would not matter anyway).
const ROW_CHUNK: usize = 64;

/// Largest allowed local-slope spread, relative to the mean slope, inside a
/// scaling region.
const SLOPE_TOLERANCE: f64 = 0.2;

#[inline]
fn chebyshev_within(a: &[f64], b: &[f64], limit: f64) -> Option<f64> {
    let mut m = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let d = (x - y).abs();
        if d > limit {
            return None;
        }
        m = m.max(d);
    }
    Some(m)
}

/// Number of pairs `i < j`, `j − i > theiler`, within each radius.
///
/// `radii` must be sorted ascending; entry `k` of the result counts pairs at
/// Chebyshev distance `≤ radii[k]`.
pub fn pair_counts(emb: &EmbeddedSeries, radii: &[f64], theiler: usize) -> Vec<u64> {
    debug_assert!(radii.windows(2).all(|w| w[0] <= w[1]));
    let p = emb.len();
    let Some(&rmax) = radii.last() else {
        return Vec::new();
    };
    let buckets = (0..p.div_ceil(ROW_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut local = vec![0u64; radii.len()];
            let start = chunk * ROW_CHUNK;
            for i in start..(start + ROW_CHUNK).min(p) {
                let a = emb.point(i);
                for j in (i + theiler + 1)..p {
                    if let Some(dist) = chebyshev_within(a, emb.point(j), rmax) {
                        local[radii.partition_point(|&r| r < dist)] += 1;
                    }
                }
            }
            local
        })
        .reduce(
            || vec![0u64; radii.len()],
            |mut acc, x| {
                for (a, b) in acc.iter_mut().zip(x) {
                    *a += b;
                }
                acc
            },
        );
    let mut running = 0;
    buckets
        .into_iter()
        .map(|c| {
            running += c;
            running
        })
        .collect()
}

fn check_pairs(emb: &EmbeddedSeries, theiler: usize) -> Result<f64> {
    let p = emb.len();
    if p < 2 || theiler + 1 >= p {
        return Err(Error::InsufficientData {
            what: "correlation sum (usable point pairs)",
            needed: theiler + 2,
            got: p,
        });
    }
    Ok(p as f64 * (p as f64 - 1.0) / 2.0)
}

/// `CI(R) = 2 / (P(P−1)) · #{i < j : dist ≤ R, j − i > theiler}`.
pub fn correlation_integral(emb: &EmbeddedSeries, radius: f64, theiler: usize) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::param(format!("radius must be > 0, got {radius}")));
    }
    let norm = check_pairs(emb, theiler)?;
    Ok(pair_counts(emb, &[radius], theiler)[0] as f64 / norm)
}

/// Correlation sums for every radius in `radii` (any order, results aligned).
pub fn correlation_sums(emb: &EmbeddedSeries, radii: &[f64], theiler: usize) -> Result<Vec<f64>> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::param("radii must be > 0"));
    }
    let norm = check_pairs(emb, theiler)?;
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
    let counts = pair_counts(emb, &sorted, theiler);
    let mut out = vec![0.0; radii.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = counts[k] as f64 / norm;
    }
    Ok(out)
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Result of one power-law fit of `CI(R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrDimFit {
    pub nu: f64,
    /// `(R_low, R_high)` of the selected scaling region.
    pub fit_range: (f64, f64),
    pub radii: Vec<f64>,
    pub sums: Vec<f64>,
}

/// Correlation dimension estimates across embedding dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrDimCurve {
    pub dims: Vec<usize>,
    pub nus: Vec<f64>,
    pub fit_ranges: Vec<(f64, f64)>,
}

impl CorrDimCurve {
    /// Embed `series` at each dimension and fit the correlation dimension.
    pub fn compute(
        series: &[f64],
        dims: &[usize],
        lag: usize,
        grid: &[f64],
        theiler: usize,
    ) -> Result<Self> {
        let mut curve = CorrDimCurve {
            dims: Vec::new(),
            nus: Vec::new(),
            fit_ranges: Vec::new(),
        };
        for &d in dims {
            let emb = embed(series, d, lag)?;
            let fit = correlation_dimension(&emb, grid, theiler)?;
            curve.dims.push(d);
            curve.nus.push(fit.nu);
            curve.fit_ranges.push(fit.fit_range);
        }
        Ok(curve)
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

fn slopes_consistent(slopes: &[f64]) -> bool {
    let (lo, hi) = slopes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    hi - lo <= 1e-12 || hi - lo < SLOPE_TOLERANCE * mean.abs()
}

/// Slope of `ln CI` against `ln R` over an automatically selected scaling
/// region: the longest contiguous run of grid intervals whose local slopes
/// spread by less than 20% of their mean (ties go to smaller radii).
pub fn correlation_dimension(
    emb: &EmbeddedSeries,
    r_grid: &[f64],
    theiler: usize,
) -> Result<CorrDimFit> {
    if r_grid.len() < 10 {
        return Err(Error::param(format!(
            "radius grid needs at least 10 values, got {}",
            r_grid.len()
        )));
    }
    let mut radii = r_grid.to_vec();
    radii.sort_by(f64::total_cmp);
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("radius grid must not repeat values"));
    }
    let sums = correlation_sums(emb, &radii, theiler)?;

    let usable: Vec<usize> = (0..radii.len()).filter(|&k| sums[k] > 0.0).collect();
    let xs: Vec<f64> = usable.iter().map(|&k| radii[k].ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&k| sums[k].ln()).collect();
    let slopes: Vec<f64> = (1..xs.len())
        .map(|k| (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]))
        .collect();

    let mut best: Option<(usize, usize)> = None; // inclusive slope window
    for a in 0..slopes.len() {
        for b in (a + 1)..slopes.len() {
            if !slopes_consistent(&slopes[a..=b]) {
                break;
            }
            if best.is_none_or(|(ba, bb)| b - a > bb - ba) {
                best = Some((a, b));
            }
        }
    }
    let Some((a, b)) = best else {
        return Err(Error::Estimation(format!(
            "no scaling region in correlation sums; usable radii {}, local slopes {:?}",
            usable.len(),
            slopes
        )));
    };
    let nu = least_squares_slope(&xs[a..=b + 1], &ys[a..=b + 1]).max(0.0);
    Ok(CorrDimFit {
        nu,
        fit_range: (radii[usable[a]], radii[usable[b + 1]]),
        radii,
        sums,
    })
}

/// Recurrent index pairs `(i, j)` with `dist ≤ ε`, both orders and the
/// diagonal included, sorted.
pub fn recurrence_matrix(emb: &EmbeddedSeries, eps: f64) -> Result<Vec<(usize, usize)>> {
    if !(eps > 0.0) {
        return Err(Error::param(format!("epsilon must be > 0, got {eps}")));
    }
    let p = emb.len();
    let rows: Vec<Vec<(usize, usize)>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let a = emb.point(i);
            (0..p)
                .filter(|&j| chebyshev_within(a, emb.point(j), eps).is_some())
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
