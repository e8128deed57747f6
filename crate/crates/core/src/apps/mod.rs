//! Randomized algorithms that consume a recorded random stream.
//!
//! Every draw goes through [`RandomSource`], which reads the stream bit by
//! bit and fails loudly once it runs dry instead of wrapping around.

mod generate;
mod mincut;
mod pagerank;
mod rbo;
mod source;
mod walk;

pub use generate::{generate_graph, generate_web};
pub use mincut::{
    brute_force_min_cut, default_iterations, karger_min_cut, Graph, KargerResult,
    MAX_BRUTE_FORCE_NODES,
};
pub use pagerank::{
    l1_distance, pagerank_power, pagerank_walk, ranking, Web, DEFAULT_DAMPING, DEFAULT_WALK_STEPS,
    DEFAULT_WEB_NODES, MAX_POWER_ITERATIONS,
};
pub use rbo::{rbo, DEFAULT_PERSISTENCE};
pub use source::{draw_bernoulli, draw_uniform, RandomSource};
pub use walk::{mean_squared_displacement, random_walk_3d, squared_displacement};
