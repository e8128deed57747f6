use serde::{Deserialize, Serialize};

use super::source::{draw_bernoulli, draw_uniform, RandomSource};
use crate::{Error, Result};

pub const DEFAULT_DAMPING: f64 = 0.85;
/// Web size used when no web is supplied.
pub const DEFAULT_WEB_NODES: usize = 50;
/// Random-surfer steps per comparison.
pub const DEFAULT_WALK_STEPS: u64 = 1_000_000;
/// Power iterations attempted before giving up.
pub const MAX_POWER_ITERATIONS: usize = 10_000;

/// Directed graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Web {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Web {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let w = Self { nodes, edges };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::Validation("web has no nodes".into()));
        }
        for &(a, b) in &self.edges {
            if a >= self.nodes || b >= self.nodes {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) outside {} nodes",
                    self.nodes
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at node {a}")));
            }
        }
        if let Some(v) = self.out_lists().iter().position(Vec::is_empty) {
            return Err(Error::Validation(format!("node {v} has no out-edge")));
        }
        Ok(())
    }

    /// Out-neighbours per node, in edge-list order.
    pub fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes];
        for &(a, b) in &self.edges {
            out[a].push(b);
        }
        out
    }
}

fn check_damping(damping: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&damping) {
        return Err(Error::param(format!("damping {damping} outside [0, 1]")));
    }
    Ok(())
}

/// Power iteration until the L1 change drops below `tol`.
pub fn pagerank_power(web: &Web, damping: f64, tol: f64) -> Result<Vec<f64>> {
    web.validate()?;
    check_damping(damping)?;
    let n = web.nodes;
    let out = web.out_lists();
    let mut r = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        next.iter_mut()
            .for_each(|x| *x = (1.0 - damping) / n as f64);
        for (v, targets) in out.iter().enumerate() {
            let share = damping * r[v] / targets.len() as f64;
            for &t in targets {
                next[t] += share;
            }
        }
        let change = l1_distance(&r, &next);
        std::mem::swap(&mut r, &mut next);
        if change < tol {
            return Ok(r);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_POWER_ITERATIONS,
    })
}

/// Visit frequencies of one long walk that follows a uniform out-edge with
/// probability `damping` and otherwise jumps to a uniform node.
pub fn pagerank_walk(
    web: &Web,
    src: &mut RandomSource,
    n_steps: u64,
    damping: f64,
) -> Result<Vec<f64>> {
    web.validate()?;
    check_damping(damping)?;
    if n_steps == 0 {
        return Err(Error::param("pagerank_walk needs at least one step"));
    }
    let n = web.nodes as u64;
    let out = web.out_lists();
    let mut visits = vec![0u64; web.nodes];
    let mut cur = draw_uniform(src, n)? as usize;
    for step in 0..n_steps {
        visits[cur] += 1;
        if step + 1 == n_steps {
            break;
        }
        cur = if draw_bernoulli(src, damping)? {
            let targets = &out[cur];
            targets[draw_uniform(src, targets.len() as u64)? as usize]
        } else {
            draw_uniform(src, n)? as usize
        };
    }
    Ok(visits.iter().map(|&v| v as f64 / n_steps as f64).collect())
}

/// Node indices ordered by decreasing score, ties by index.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
