//! Diameter and dispersion of k-CNF solution spaces.
//!
//! Exact algorithms (Walsh-Hadamard convolution, triangle search on tuple graphs), randomized
//! farthest-point oracles built on PPZ and Schoening local search, dispersion drivers on top of
//! those oracles, and reductions from subset problems.

pub mod clique;
pub mod cnf;
pub mod dispersion;
pub mod error;
pub mod fwht;
pub mod gen;
pub mod ppz;
pub mod probe;
pub mod rng;
pub mod schoning;
pub mod subset;

pub use cnf::{Assignment, CnfFormula, DispersionObjective, SolutionCollection, WeightConstraint};
pub use error::{Error, Result};
