//! Max-Sum solvers for distributed constraint optimization problems, with a
//! policy-driven decimation framework for loopy factor graphs.
//!
//! - [`dcop`]: problem model, slicing, exhaustive optimum
//! - [`graph`]: factor-graph adjacency
//! - [`engine`]: synchronous Max-Sum message passing
//! - [`decimation`]: trigger/filter/perform/assign policies and the decimation loop
//! - [`variants`]: Max-Sum, Max-Sum_AD, Max-Sum_AD_VP and decimation presets
//! - [`ising`]: toroidal Ising benchmark instances
//! - [`io`]: JSON problem files
//! - [`harness`]: seeded experiment sweeps and result tables

pub mod dcop;
pub mod decimation;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod ising;
mod outcome;
pub mod rng;
pub mod variants;

pub use dcop::{brute_force_optimum, slice_factor, Assignment, Dcop, Factor, Sense, Variable};
pub use decimation::{run_decimaxsum, DecimationPolicy};
pub use engine::{EngineConfig, EngineState};
pub use error::{Error, Result};
pub use graph::FactorGraph;
pub use outcome::RunOutcome;
pub use rng::RngStream;
pub use variants::Algorithm;
