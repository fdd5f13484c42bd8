//! Formulas, assignments, DIMACS input, dispersion measures and exhaustive oracles.

mod assignment;
mod brute;
mod collection;
mod dimacs;
mod formula;

pub use assignment::{bits, Assignment};
pub use brute::{
    brute_opt, diameter_via_min_ones, enumerate_solutions, enumerate_solutions_with_limit,
    min_ones_brute, opt_over_points, solution_indices, Optimum, DEFAULT_ENUMERATION_LIMIT,
};
pub use collection::{
    dispersion_measures, DispersionObjective, Measures, SolutionCollection, WeightConstraint,
};
pub use dimacs::parse_dimacs;
pub use formula::{Clause, CnfFormula, Evaluator, IndexEvaluator, Literal};
