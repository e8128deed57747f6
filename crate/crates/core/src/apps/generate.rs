use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mincut::Graph;
use super::pagerank::Web;
use crate::{Error, Result};

const MAX_ATTEMPTS: usize = 1000;

fn check(n_nodes: usize, edge_prob: f64) -> Result<()> {
    if n_nodes < 2 {
        return Err(Error::param(format!(
            "need at least 2 nodes, got {n_nodes}"
        )));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::param(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Random digraph: each ordered pair is linked with `edge_prob`, then every
/// node without an out-edge gets one to a uniformly chosen other node.
pub fn generate_web(n_nodes: usize, edge_prob: f64, seed: u64) -> Result<Web> {
    check(n_nodes, edge_prob)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n_nodes {
        let start = edges.len();
        for b in 0..n_nodes {
            if a != b && rng.random_bool(edge_prob) {
                edges.push((a, b));
            }
        }
        if edges.len() == start {
            let mut b = rng.random_range(0..n_nodes - 1);
            if b >= a {
                b += 1;
            }
            edges.push((a, b));
        }
    }
    Web::new(n_nodes, edges)
}

/// Connected random graph: each pair is linked with `edge_prob`; draws that
/// come out disconnected are retried.
pub fn generate_graph(n_nodes: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    check(n_nodes, edge_prob)?;
    if edge_prob == 0.0 {
        return Err(Error::param(
            "edge probability 0 cannot give a connected graph",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for a in 0..n_nodes {
            for b in a + 1..n_nodes {
                if rng.random_bool(edge_prob) {
                    edges.push((a, b));
                }
            }
        }
        let g = Graph {
            nodes: n_nodes,
            edges,
        };
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::param(format!(
        "no connected graph with {n_nodes} nodes at edge probability {edge_prob} after {MAX_ATTEMPTS} attempts"
    )))
}
