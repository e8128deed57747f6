use super::source::{draw_uniform, RandomSource};
use crate::Result;

const DIRECTIONS: [[i64; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

/// Simple random walk on the cubic lattice; returns `steps + 1` points
/// starting at the origin.
pub fn random_walk_3d(src: &mut RandomSource, steps: usize) -> Result<Vec<[i64; 3]>> {
    let mut path = Vec::with_capacity(steps + 1);
    let mut p = [0i64; 3];
    path.push(p);
    for _ in 0..steps {
        let d = DIRECTIONS[draw_uniform(src, 6)? as usize];
        for k in 0..3 {
            p[k] += d[k];
        }
        path.push(p);
    }
    Ok(path)
}

pub fn squared_displacement(point: &[i64; 3]) -> i64 {
    point.iter().map(|c| c * c).sum()
}

/// Mean of `|X_n|^2` over the final points of the given walks.
pub fn mean_squared_displacement(walks: &[Vec<[i64; 3]>]) -> f64 {
    if walks.is_empty() {
        return 0.0;
    }
    let total: i64 = walks
        .iter()
        .map(|w| w.last().map_or(0, squared_displacement))
        .sum();
    total as f64 / walks.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps() {
        let mut s = RandomSource::from_bytes(vec![]);
        assert_eq!(random_walk_3d(&mut s, 0).unwrap(), vec![[0, 0, 0]]);
    }

    #[test]
    fn steps_are_unit_moves() {
        let mut s = RandomSource::chacha(5, 10_000);
        let path = random_walk_3d(&mut s, 5000).unwrap();
        assert_eq!(path.len(), 5001);
        for w in path.windows(2) {
            let diff: i64 = (0..3).map(|k| (w[1][k] - w[0][k]).abs()).sum();
            assert_eq!(diff, 1);
        }
    }

    #[test]
    fn diffusion_law() {
        let mut s = RandomSource::chacha(6, 400_000);
        let walks: Vec<_> = (0..500)
            .map(|_| random_walk_3d(&mut s, 400).unwrap())
            .collect();
        let msd = mean_squared_displacement(&walks);
        assert!((msd / 400.0 - 1.0).abs() < 0.15, "{msd}");
    }

    #[test]
    fn exhaustion_propagates() {
        let mut s = RandomSource::from_bytes(vec![0]);
        assert!(random_walk_3d(&mut s, 10).is_err());
    }
}
