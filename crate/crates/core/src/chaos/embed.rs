use crate::{Error, Result};

/// Delay vectors `(s_i, s_{i+lag}, …, s_{i+(d−1)lag})` of a min-max
/// normalised series, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSeries {
    coords: Vec<f64>,
    pub d: usize,
    pub lag: usize,
}

impl EmbeddedSeries {
    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Keep only the first `count` points.
    pub fn truncate(&mut self, count: usize) {
        self.coords.truncate(count * self.d);
    }

    /// Embedding built from explicit points (already normalised).
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(Error::param("points must share a dimension >= 1"));
        }
        Ok(Self {
            coords: points.iter().flatten().copied().collect(),
            d,
            lag: 1,
        })
    }
}

/// Min-max normalise to `[0, 1]`; a constant series maps to zeros.
pub(crate) fn normalize(series: &[f64]) -> Vec<f64> {
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    if span > 0.0 {
        series.iter().map(|&v| (v - lo) / span).collect()
    } else {
        vec![0.0; series.len()]
    }
}

pub fn embed(series: &[f64], d: usize, lag: usize) -> Result<EmbeddedSeries> {
    if d == 0 || lag == 0 {
        return Err(Error::param(format!(
            "embedding needs d >= 1 and lag >= 1 (got {d}, {lag})"
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("series contains non-finite values"));
    }
    let span = (d - 1) * lag;
    if series.len() <= span {
        return Err(Error::InsufficientData {
            what: "time-delay embedding",
            needed: span + 1,
            got: series.len(),
        });
    }
    let norm = normalize(series);
    let count = series.len() - span;
    let mut coords = Vec::with_capacity(count * d);
    for i in 0..count {
        for k in 0..d {
            coords.push(norm[i + k * lag]);
        }
    }
    Ok(EmbeddedSeries { coords, d, lag })
}
