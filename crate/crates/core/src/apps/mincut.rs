use serde::{Deserialize, Serialize};

use super::source::{draw_uniform, RandomSource};
use crate::{Error, Result};

/// Largest graph accepted by the exhaustive oracle.
pub const MAX_BRUTE_FORCE_NODES: usize = 20;

/// Undirected multigraph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Graph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Self { nodes, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.nodes).collect();
        let mut components = self.nodes;
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components == 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Validation(format!(
                "graph needs at least 2 nodes, has {}",
                self.nodes
            )));
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
        if !self.is_connected() {
            return Err(Error::Validation("graph is disconnected".into()));
        }
        Ok(())
    }

    /// Edges crossing the bipartition given by `side`.
    pub fn cut_size(&self, side: impl Fn(usize) -> bool) -> u64 {
        self.edges
            .iter()
            .filter(|&&(a, b)| side(a) != side(b))
            .count() as u64
    }
}

/// `ceil(N(N-1)/2 * ln N)` contraction runs, at least one.
pub fn default_iterations(nodes: usize) -> usize {
    let n = nodes as f64;
    ((n * (n - 1.0) / 2.0 * n.ln()).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KargerResult {
    pub best: u64,
    /// Cut found by each run.
    pub cuts: Vec<u64>,
    /// Running minimum after each run.
    pub trace: Vec<u64>,
}

fn contract_once(graph: &Graph, src: &mut RandomSource) -> Result<u64> {
    let mut label: Vec<usize> = (0..graph.nodes).collect();
    let mut edges = graph.edges.clone();
    let mut groups = graph.nodes;
    while groups > 2 {
        let (a, b) = edges[draw_uniform(src, edges.len() as u64)? as usize];
        let (keep, gone) = (label[a], label[b]);
        for l in label.iter_mut() {
            if *l == gone {
                *l = keep;
            }
        }
        groups -= 1;
        edges.retain(|&(x, y)| label[x] != label[y]);
    }
    Ok(edges.len() as u64)
}

/// Repeated random contraction; each run merges uniformly chosen edges of
/// the current multigraph until two super-nodes remain.
pub fn karger_min_cut(
    graph: &Graph,
    src: &mut RandomSource,
    iterations: usize,
) -> Result<KargerResult> {
    graph.validate()?;
    if iterations == 0 {
        return Err(Error::param("karger_min_cut needs at least one iteration"));
    }
    let mut cuts = Vec::with_capacity(iterations);
    let mut trace = Vec::with_capacity(iterations);
    let mut best = u64::MAX;
    for _ in 0..iterations {
        let c = contract_once(graph, src)?;
        best = best.min(c);
        cuts.push(c);
        trace.push(best);
    }
    Ok(KargerResult { best, cuts, trace })
}

/// Exact minimum cut over all nontrivial bipartitions.
pub fn brute_force_min_cut(graph: &Graph) -> Result<u64> {
    graph.validate()?;
    if graph.nodes > MAX_BRUTE_FORCE_NODES {
        return Err(Error::param(format!(
            "brute-force min cut supports at most {MAX_BRUTE_FORCE_NODES} nodes, got {}",
            graph.nodes
        )));
    }
    // The last node stays on side 0, so each bipartition is visited once.
    let n = graph.nodes;
    let best = (1u32..(1 << (n - 1)))
        .map(|mask| graph.cut_size(|v| v < n - 1 && mask & (1 << v) != 0))
        .min()
        .expect("at least one bipartition");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(
            brute_force_min_cut(&Graph::new(2, vec![(0, 1); 3]).unwrap()).unwrap(),
            3
        );
        assert_eq!(
            brute_force_min_cut(&Graph::new(3, vec![(0, 1), (1, 2)]).unwrap()).unwrap(),
            1
        );
        let k4 = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(brute_force_min_cut(&k4).unwrap(), 3);
        assert_eq!(brute_force_min_cut(&cycle(9)).unwrap(), 2);
    }

    #[test]
    fn parallel_pair_in_one_run() {
        let g = Graph::new(2, vec![(0, 1); 4]).unwrap();
        let mut s = RandomSource::from_bytes(vec![]);
        assert_eq!(karger_min_cut(&g, &mut s, 1).unwrap().best, 4);
    }

    #[test]
    fn cycle_found_within_budget() {
        let g = cycle(10);
        let mut s = RandomSource::chacha(8, 1 << 20);
        let r = karger_min_cut(&g, &mut s, default_iterations(10)).unwrap();
        assert_eq!(r.best, 2);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.cuts.iter().all(|&c| c >= 2));
    }

    #[test]
    fn disconnected_and_oversized_rejected() {
        assert!(matches!(
            Graph::new(3, vec![(0, 1)]),
            Err(Error::Validation(_))
        ));
        let big = cycle(21);
        assert!(matches!(
            brute_force_min_cut(&big),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn budget_formula() {
        assert_eq!(default_iterations(2), 1);
        assert_eq!(default_iterations(10), (45.0 * 10f64.ln()).ceil() as usize);
    }
}
