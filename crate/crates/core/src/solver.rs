//! The discrete fixed-point iteration.
//!
//! Starting from Φ₀(x_i) = f(x_i, 0, 0, 0), each sweep realizes
//!
//! ```text
//! U = a0·Φ,  V = a1·Φ,  Z = kmat·U,  Φ⁺(x_i) = f(x_i, U_i, V_i, Z_i)
//! ```
//!
//! and the iteration count m is the number of executed sweeps. Stopping is
//! checked after the sweep: the successive rule against ‖Φ⁺ − Φ‖∞ and the
//! exact-error rule against the U just computed (which therefore lags Φ by
//! one application). The reported solution is that U, V pair.
//!
//! The scheme is plain successive substitution without relaxation or
//! damping, so under a contraction certificate q < 1 the residuals decay
//! geometrically, and the first residual ‖Φ₁ − Φ₀‖∞ is the displacement d
//! that feeds the a-priori bound.

use crate::error::{Error, Result};
use crate::kernels::GreenTables;
use crate::problem::Problem;
use crate::quadrature::GridSpec;
use std::io;

/// State after m sweeps: Φ_m plus the U, V, Z computed in the latest sweep.
#[derive(Debug, Clone)]
pub struct IterationState {
    /// Number of sweeps executed so far.
    pub m: usize,
    pub phi: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub z: Vec<f64>,
    /// ‖Φ_m − Φ_{m−1}‖∞; None before the first sweep.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// Stop when ‖Φ_m − Φ_{m−1}‖∞ ≤ eps.
    Successive { eps: f64 },
    /// Stop when ‖U_m − u_exact‖∞ ≤ h²; requires a problem with exact_u.
    ExactError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    criterion: Criterion,
    max_iter: usize,
}

impl StoppingRule {
    pub const DEFAULT_MAX_ITER: usize = 1000;

    pub fn successive(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "stopping tolerance must be positive, got {eps}"
            )));
        }
        Ok(Self {
            criterion: Criterion::Successive { eps },
            max_iter: Self::DEFAULT_MAX_ITER,
        })
    }

    pub fn exact_error() -> Self {
        Self {
            criterion: Criterion::ExactError,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    pub fn with_max_iter(mut self, cap: usize) -> Self {
        self.max_iter = cap;
        self
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
}

/// Converged grid solution.
#[derive(Debug, Clone)]
pub struct Solution {
    pub grid: GridSpec,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub error_u: Option<f64>,
    pub error_v: Option<f64>,
}

impl Solution {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }

    /// CSV with header `x,u,v`, one node per line, shortest round-trip
    /// decimal representation.
    pub fn write_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "x,u,v")?;
        for i in 0..self.grid.len() {
            writeln!(w, "{},{},{}", self.grid.node(i), self.u[i], self.v[i])?;
        }
        Ok(())
    }
}

/// max_i |a_i − b_i|
pub fn max_norm_diff(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Φ₀(x_i) = f(x_i, 0, 0, 0); U, V, Z start at zero.
pub fn init(problem: &Problem, grid: &GridSpec) -> Result<IterationState> {
    let mut phi = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.node(i);
        let value = problem
            .f(x, 0.0, 0.0, 0.0)
            .map_err(|e| Error::Eval(format!("f at node {i} (x = {x}): {e}")))?;
        if !value.is_finite() {
            return Err(Error::Eval(format!(
                "f(x, 0, 0, 0) is not finite at node {i} (x = {x})"
            )));
        }
        phi.push(value);
    }
    let zeros = vec![0.0; grid.len()];
    Ok(IterationState {
        m: 0,
        phi,
        u: zeros.clone(),
        v: zeros.clone(),
        z: zeros,
        residual: None,
    })
}

/// One sweep: U = a0·Φ, V = a1·Φ, Z = kmat·U, then Φ⁺(x_i) = f(x_i, U,V,Z),
/// m incremented, residual = ‖Φ⁺ − Φ‖∞.
pub fn sweep(
    state: &IterationState,
    tables: &GreenTables,
    problem: &Problem,
) -> Result<IterationState> {
    let n = tables.n();
    if state.phi.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "state has {} nodes but tables were built for N = {n}",
            state.phi.len()
        )));
    }
    let iteration = state.m + 1;
    let u = tables.apply_green0(&state.phi);
    let v = tables.apply_green1(&state.phi);
    let z = tables.apply_kernel(&u);
    for (name, vec) in [("U", &u), ("V", &v), ("Z", &z)] {
        if let Some(i) = vec.iter().position(|x| !x.is_finite()) {
            return Err(Error::Eval(format!(
                "{name} is not finite at node {i} in iteration {iteration}"
            )));
        }
    }
    debug_assert_eq!(u[0], 0.0);
    debug_assert_eq!(u[n], 0.0);

    let mut phi_next = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = i as f64 / n as f64;
        let value = problem.f(x, u[i], v[i], z[i]).map_err(|e| {
            Error::Eval(format!("f at node {i} in iteration {iteration}: {e}"))
        })?;
        if !value.is_finite() {
            return Err(Error::Eval(format!(
                "f is not finite at node {i} in iteration {iteration}"
            )));
        }
        phi_next.push(value);
    }
    let residual = max_norm_diff(&phi_next, &state.phi)?;
    Ok(IterationState {
        m: iteration,
        phi: phi_next,
        u,
        v,
        z,
        residual: Some(residual),
    })
}

fn eval_exact(exact: &crate::problem::Exact, grid: &GridSpec) -> Result<Vec<f64>> {
    (0..grid.len()).map(|i| exact(grid.node(i))).collect()
}

/// Run the iteration until the stopping rule fires.
///
/// Exceeding the iteration cap is an error, not a best-effort return.
pub fn solve(problem: &Problem, grid: &GridSpec, rule: &StoppingRule) -> Result<Solution> {
    let exact_u = problem
        .exact_u()
        .map(|f| eval_exact(f, grid))
        .transpose()?;
    if matches!(rule.criterion(), Criterion::ExactError) && exact_u.is_none() {
        return Err(Error::InvalidArgument(
            "exact-error stopping requires a problem with a known exact solution".into(),
        ));
    }
    let tables = GreenTables::build(problem, grid)?;
    let h2 = grid.h() * grid.h();

    let mut state = init(problem, grid)?;
    let mut history = Vec::new();
    loop {
        state = sweep(&state, &tables, problem)?;
        let residual = state.residual.expect("sweep sets the residual");
        history.push(residual);
        let stop = match rule.criterion() {
            Criterion::Successive { eps } => residual <= eps,
            Criterion::ExactError => {
                max_norm_diff(&state.u, exact_u.as_ref().expect("checked above"))? <= h2
            }
        };
        if stop {
            break;
        }
        if state.m >= rule.max_iter() {
            return Err(Error::NonConvergence {
                iterations: state.m,
                residual,
            });
        }
    }

    let error_u = exact_u
        .as_ref()
        .map(|e| max_norm_diff(&state.u, e))
        .transpose()?;
    let error_v = problem
        .exact_v()
        .map(|f| eval_exact(f, grid))
        .transpose()?
        .map(|e| max_norm_diff(&state.v, &e))
        .transpose()?;
    Ok(Solution {
        grid: grid.clone(),
        u: state.u,
        v: state.v,
        iterations: state.m,
        residual_history: history,
        error_u,
        error_v,
    })
}
