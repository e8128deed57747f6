use std::collections::HashSet;
use std::hash::Hash;

use crate::{Error, Result};

pub const DEFAULT_PERSISTENCE: f64 = 0.9;

fn check_unique<T: Eq + Hash + std::fmt::Debug>(list: &[T]) -> Result<()> {
    let mut seen = HashSet::with_capacity(list.len());
    for x in list {
        if !seen.insert(x) {
            return Err(Error::Validation(format!(
                "ranking lists {x:?} more than once"
            )));
        }
    }
    Ok(())
}

/// Extrapolated rank-biased overlap at persistence `p`, evaluated to the
/// depth of the shorter list.
pub fn rbo<T: Eq + Hash + std::fmt::Debug>(a: &[T], b: &[T], p: f64) -> Result<f64> {
    check_unique(a)?;
    check_unique(b)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("persistence {p} outside (0, 1)")));
    }
    let depth = a.len().min(b.len());
    if depth == 0 {
        return Err(Error::Validation(
            "rank-biased overlap of an empty ranking".into(),
        ));
    }
    let mut seen_a = HashSet::with_capacity(depth);
    let mut seen_b = HashSet::with_capacity(depth);
    let mut overlap = 0usize;
    let mut sum = 0.0;
    let mut weight = 1.0;
    let mut agreement = 0.0;
    for d in 0..depth {
        let (x, y) = (&a[d], &b[d]);
        if x == y {
            overlap += 1;
        } else {
            overlap += usize::from(seen_b.contains(x)) + usize::from(seen_a.contains(y));
        }
        seen_a.insert(x);
        seen_b.insert(y);
        agreement = overlap as f64 / (d + 1) as f64;
        sum += weight * agreement;
        weight *= p;
    }
    // weight is now p^depth
    Ok(((1.0 - p) * sum + weight * agreement).clamp(0.0, 1.0))
}
