//! Finite-difference solvers for the Dirichlet problem of the k-Hessian equation
//! `S_k(D²u) = f` on the unit square and cube.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: lattice, mesh functions and the second-order difference stencils;
//! * [`hessian`]: `S_k`, its derivative matrix, eigenvalues and admissibility;
//! * [`elliptic`]: assembled linear operators and their solvers;
//! * [`iterations`]: fixed-point, frozen-coefficient, Newton and Gauss-Seidel
//!   iterations, plus the degenerate Monge-Ampère double iteration;
//! * [`problems`]: the test-problem catalog;
//! * [`report`]: convergence studies, tables and CSV field/slice files.

pub mod elliptic;
pub mod error;
pub mod grid;
pub mod hessian;
pub mod iterations;
pub mod problems;
pub mod report;
pub mod sparse;
pub mod symmat;

pub use error::{Error, Result};
pub use grid::{discrete_hessian, discrete_laplacian, restrict, Grid, MeshFunction};
pub use hessian::{c_const, eigenvalues_sym, is_k_admissible, s_k, s_k_gradient, HessianOrder};
pub use iterations::{solve, InitRule, IterationConfig, Method, SolveReport, Termination};
pub use problems::{make_problem, max_error, Problem};
pub use symmat::SymMat;
