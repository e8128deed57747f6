//! Simulation, extraction and assessment of a telegraph-noise entropy source.
//!
//! The crate is organised along the data flow of a hardware TRNG study:
//!
//! - [`device`]: continuous-time Markov model of a charge-trap junction that
//!   emits sampled voltage traces.
//! - [`extraction`]: high-pass filtering, edge detection and time-bin
//!   symbolization of a trace into an n-bit [`extraction::SymbolStream`].
//! - [`stats`]: Shannon entropy, block statistics and figure-style exports.
//! - [`chaos`]: time-delay embedding, correlation sums, correlation dimension,
//!   K2 entropy and a Lorenz reference system.
//! - [`sp90b`]: IID permutation and chi-square tests, MCV min-entropy,
//!   restart tests and continuous health tests.
//! - [`apps`]: randomized algorithms driven by a recorded random stream.
//! - [`pipeline`] and [`cli`]: end-to-end composition and the command line.

pub mod apps;
pub mod chaos;
pub mod cli;
pub mod device;
mod error;
pub mod extraction;
pub mod formats;
pub mod manifest;
pub mod pipeline;
pub mod schemas;
pub mod sp90b;
pub mod stats;

pub use error::{Error, Result};
