//! Exact quantile regression through the dual arrangement of the data.
//!
//! Every optimum of the pinball loss passes through `d` data points, so the
//! solvers here search vertices of the dual hyperplane arrangement rather
//! than running a numerical optimizer:
//!
//! * [`brute_force_solve`] scores every vertex,
//! * [`neighbor_descent_solve_2d`] walks the planar arrangement downhill,
//! * [`qreg2d_solve`] follows the quantile's level of the line arrangement,
//! * [`randqr_solve`] narrows a random interval around the optimum in any
//!   dimension.
//!
//! [`solve`] wraps all four with input perturbation.

pub mod dataset;
pub mod error;
pub mod geometry;
pub mod klevel;
pub mod objective;
pub mod oracle;
pub mod randqr;
pub mod report;
pub mod solver;

mod combinations;

pub use dataset::{generate_synthetic, load_csv, perturb, Dataset, Quantile, SyntheticSpec};
pub use error::{QregError, Result};
pub use klevel::qreg2d_solve;
pub use objective::{compute_score, objective};
pub use oracle::{brute_force_solve, neighbor_descent_solve_2d, Solution, SolveStats};
pub use randqr::{randqr_solve, randqr_solve_traced, write_trace_csv, TraceRow};
pub use report::RunReport;
pub use solver::{solve, Algorithm, Run, SolveOptions};
