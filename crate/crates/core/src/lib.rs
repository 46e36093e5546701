//! Solver library for the fourth-order nonlinear integro-differential
//! boundary value problem
//!
//! ```text
//! u''''(x) = f(x, u(x), u'(x), ∫₀¹ k(x,t) u(t) dt),   0 < x < 1,
//! u(0) = u(1) = u''(0) = u''(1) = 0,
//! ```
//!
//! by successive substitution on the equivalent fixed-point equation for
//! φ = u''''. Inverting the linear part through its Green function turns each
//! iteration into quadratures, realized on a uniform grid with the composite
//! trapezium rule; the grid error is O(h²) and the iteration error decays
//! geometrically whenever the contraction certificate q < 1 holds.
//!
//! Modules:
//! - [`kernels`]: Green functions G0, G1, their sup-norm constants, and the
//!   precomputed quadrature tables.
//! - [`quadrature`]: the uniform grid and trapezium rule.
//! - [`solver`]: the discrete sweep, stopping rules, and driver.
//! - [`certificate`]: contraction factor, sampled hypothesis checks, and the
//!   a-priori error envelope.
//! - [`problem`]: problem definitions and the built-in registry.
//! - [`study`]: grid-refinement studies and observed-order diagnostics.
//! - [`expr`]: the expression language for defining problems on the command
//!   line.

pub mod certificate;
pub mod error;
pub mod expr;
pub mod kernels;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod study;

pub use error::{Error, Result};
pub use kernels::GreenTables;
pub use problem::{by_name, example1, example2, from_expressions, DomainBox, Problem};
pub use quadrature::GridSpec;
pub use solver::{solve, Criterion, Solution, StoppingRule};
pub use study::{convergence_table, observed_order, ConvergenceStudy, StudyRow};
