//! Parallel problem solving on communication networks.
//!
//! A population of agents searches a shared problem. Every round each agent
//! either copies the best strictly better solution among its network
//! neighbors or, failing that, tries a single local move and keeps it when it
//! improves. The crate provides the two problem families used to dial search
//! difficulty (NK landscapes, Euclidean TSP), exact optimum oracles for both,
//! the linear and complete topologies, and the round-based engine.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel sweeps
//! and the command-line tool live in `pps-lab`.

#![no_std]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod network;
pub mod nk;
pub mod optimum;
pub mod seed;
pub mod tsp;

pub use engine::{
    init_population, run_once, step_round, step_round_traced, AgentState, Move, Problem, RunConfig,
    RunTrace,
};
pub use error::Error;
pub use network::{Network, Topology};
pub use nk::{Genotype, NkLandscape, NkProblem};
pub use optimum::OptimumRecord;
pub use seed::derive_seed;
pub use tsp::{Tour, TspInstance, TspProblem};

/// Random stream used throughout the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;
