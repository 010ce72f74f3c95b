//! Finite-difference solver for the convection-diffusion operator on a truncated strip.

mod assemble;
mod banded;
mod convergence;
mod eigen;
mod solve;
mod sparse;

pub use assemble::{
    assemble, check_peclet, AssemblyOptions, BoundaryData, Convection, LinearSystem, Ordering,
    SideClosure,
};
pub use banded::BandedLu;
pub use convergence::{
    convergence_order, log_log_slope, solution_error, ConvergenceProblem, ConvergenceStudy,
    ExactSolution,
};
pub use eigen::{continuum_min_eigenvalue, min_eigenvalue, EigenReport, EIGEN_RESIDUAL_TOL};
pub use solve::{
    operator_residual, residual_field, restrict, solve, solve_detailed, uniqueness_gap, Solution,
    SolverVariant, DEFAULT_TOL,
};
pub use sparse::CsrMatrix;
