//! Grid-refinement convergence studies and observed-order diagnostics.
//!
//! Rows are independent solves (each owns its tables) and run in parallel;
//! results keep the input order. Under the exact-error rule the error column
//! can plateau across a range of N: the iteration error dominates until h²
//! tightens enough to force one more sweep.

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::quadrature::GridSpec;
use crate::solver::{solve, StoppingRule};
use rayon::prelude::*;
use std::io;

/// One study row; `error` is ‖U_m − u_exact‖∞ when the problem has an exact
/// solution and the final residual otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub h2: f64,
    pub iterations: usize,
    pub error: f64,
}

/// What the error column holds; the CSV header never mislabels a residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Exact,
    Residual,
}

impl ErrorKind {
    pub fn column_name(self) -> &'static str {
        match self {
            ErrorKind::Exact => "error",
            ErrorKind::Residual => "residual",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<StudyRow>,
    pub error_kind: ErrorKind,
}

impl ConvergenceStudy {
    /// CSV with header `N,h2,m,error` (or `N,h2,m,residual`), scientific
    /// notation with five significant digits.
    pub fn write_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "N,h2,m,{}", self.error_kind.column_name())?;
        for r in &self.rows {
            writeln!(w, "{},{:.4e},{},{:.4e}", r.n, r.h2, r.iterations, r.error)?;
        }
        Ok(())
    }
}

/// Solve the problem once per grid size; rows are computed independently and
/// returned in input order.
pub fn convergence_table(
    problem: &Problem,
    ns: &[usize],
    rule: &StoppingRule,
) -> Result<ConvergenceStudy> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("empty grid list".into()));
    }
    let error_kind = if problem.has_exact() {
        ErrorKind::Exact
    } else {
        ErrorKind::Residual
    };
    let rows = ns
        .par_iter()
        .map(|&n| {
            let row = || -> Result<StudyRow> {
                let grid = GridSpec::new(n)?;
                let sol = solve(problem, &grid, rule)?;
                let error = match sol.error_u {
                    Some(e) => e,
                    None => sol.final_residual().unwrap_or(0.0),
                };
                Ok(StudyRow {
                    n,
                    h2: grid.h() * grid.h(),
                    iterations: sol.iterations,
                    error,
                })
            };
            row().map_err(|e| Error::StudyRow {
                n,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy { rows, error_kind })
}

/// Observed order per adjacent row pair: log(e_i/e_{i+1}) / log(N_{i+1}/N_i).
/// Pairs with zero or non-finite errors (or equal N) yield None.
pub fn observed_order(rows: &[StudyRow]) -> Vec<Option<f64>> {
    rows.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if !(a.error.is_finite() && b.error.is_finite()) || a.error <= 0.0 || b.error <= 0.0 {
                return None;
            }
            if a.n == b.n {
                return None;
            }
            Some((a.error / b.error).ln() / (b.n as f64 / a.n as f64).ln())
        })
        .collect()
}
