//! Closed-form kernels of the Navier beam operator and their quadrature tables.
//!
//! `green0` is the Green function of u'''' = φ under u(0) = u(1) = u''(0) =
//! u''(1) = 0, so u(x) = ∫₀¹ G0(x,s) φ(s) ds; `green1` is its x-derivative and
//! yields u'. Both are piecewise cubic in s with a kink only in the third
//! derivative on the diagonal, which is why the composite trapezium rule keeps
//! its full O(h²) order when kinks fall on grid nodes.
//!
//! `GreenTables` bakes the grid step and trapezium weights into dense matrices
//! so that one solver sweep is three matrix-vector products.

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::quadrature::GridSpec;
use rayon::prelude::*;

/// max over x of ∫₀¹ |G0(x,s)| ds = 5/384, attained at x = 1/2.
pub const M0: f64 = 5.0 / 384.0;
/// max over x of ∫₀¹ |G1(x,s)| ds = 1/24, attained at the endpoints.
pub const M1: f64 = 1.0 / 24.0;

/// The pair (M0, M1).
pub fn constants() -> (f64, f64) {
    (M0, M1)
}

fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidArgument(format!(
            "{name} = {value} is outside [0, 1]"
        )));
    }
    Ok(())
}

// Both Green functions are symmetric in their branch structure; evaluating the
// two branches through the same expression with (lo, hi) = sorted arguments
// makes green0(x, s) == green0(s, x) bit-exact.
#[inline]
fn green0_sorted(lo: f64, hi: f64) -> f64 {
    lo * (1.0 - hi) * (2.0 * hi - hi * hi - lo * lo) / 6.0
}

/// Green function G0(x, s). Nonnegative on the unit square, zero on its
/// boundary, symmetric. Ties at s = x take the s <= x branch; the branches
/// agree there.
pub fn green0(x: f64, s: f64) -> Result<f64> {
    check_unit_interval("x", x)?;
    check_unit_interval("s", s)?;
    Ok(if s <= x {
        green0_sorted(s, x)
    } else {
        green0_sorted(x, s)
    })
}

/// x-derivative G1(x, s) = ∂G0/∂x. Continuous across the diagonal.
pub fn green1(x: f64, s: f64) -> Result<f64> {
    check_unit_interval("x", x)?;
    check_unit_interval("s", s)?;
    Ok(if s <= x {
        s * (3.0 * x * x - 6.0 * x + s * s + 2.0) / 6.0
    } else {
        (s - 1.0) * (3.0 * x * x - 2.0 * s + s * s) / 6.0
    })
}

/// Trapezium estimate of M2 = max over x of ∫₀¹ |k(x,s)| ds, maximized over
/// the grid nodes of an (n+1)-node uniform grid.
pub fn kernel_bound_m2<K>(kernel: K, n: usize) -> Result<f64>
where
    K: Fn(f64, f64) -> Result<f64>,
{
    let grid = GridSpec::new(n)?;
    let h = grid.h();
    let mut best = 0.0f64;
    for i in 0..=n {
        let x = grid.node(i);
        let mut acc = 0.0;
        for j in 0..=n {
            let s = grid.node(j);
            let v = kernel(x, s)?;
            if !v.is_finite() {
                return Err(Error::Eval(format!(
                    "kernel({x}, {s}) evaluated to a non-finite value"
                )));
            }
            let rho = if j == 0 || j == n { 0.5 } else { 1.0 };
            acc += rho * v.abs();
        }
        best = best.max(h * acc);
    }
    Ok(best)
}

/// Dense row-major matrix; all tables are (N+1) x (N+1).
#[derive(Debug, Clone)]
struct Matrix {
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(cols * rows.len());
        for row in rows {
            debug_assert_eq!(row.len(), cols);
            data.extend_from_slice(&row);
        }
        Self { cols, data }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Precomputed quadrature-weighted tables for one (problem, grid) pair:
///
/// a0\[i\]\[j\] = h ρ_j G0(x_i, x_j),
/// a1\[i\]\[j\] = h ρ_j G1(x_i, x_j),
/// kmat\[i\]\[j\] = h ρ_j k(x_i, x_j).
///
/// Immutable after construction and safe to share across threads. Every
/// kernel value is checked for finiteness here, so sweeps over a fixed
/// kernel cannot fail on the kernel side.
#[derive(Debug, Clone)]
pub struct GreenTables {
    n: usize,
    a0: Matrix,
    a1: Matrix,
    kmat: Matrix,
}

impl GreenTables {
    pub fn build(problem: &Problem, grid: &GridSpec) -> Result<Self> {
        let n = grid.n();
        let h = grid.h();
        let nodes = grid.nodes();

        // Rows are independent; the result does not depend on scheduling.
        let rows: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..n + 1)
            .into_par_iter()
            .map(|i| {
                let x = nodes[i];
                let mut r0 = Vec::with_capacity(n + 1);
                let mut r1 = Vec::with_capacity(n + 1);
                let mut rk = Vec::with_capacity(n + 1);
                for (j, &s) in nodes.iter().enumerate() {
                    let rho = if j == 0 || j == n { 0.5 } else { 1.0 };
                    let w = h * rho;
                    r0.push(w * green0(x, s)?);
                    r1.push(w * green1(x, s)?);
                    let kv = problem.kernel(x, s)?;
                    if !kv.is_finite() {
                        return Err(Error::Eval(format!(
                            "kernel({x}, {s}) evaluated to a non-finite value"
                        )));
                    }
                    rk.push(w * kv);
                }
                Ok((r0, r1, rk))
            })
            .collect::<Result<_>>()?;

        let mut a0 = Vec::with_capacity(n + 1);
        let mut a1 = Vec::with_capacity(n + 1);
        let mut kmat = Vec::with_capacity(n + 1);
        for (r0, r1, rk) in rows {
            a0.push(r0);
            a1.push(r1);
            kmat.push(rk);
        }
        Ok(Self {
            n,
            a0: Matrix::from_rows(a0),
            a1: Matrix::from_rows(a1),
            kmat: Matrix::from_rows(kmat),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a0_row(&self, i: usize) -> &[f64] {
        self.a0.row(i)
    }

    pub fn a1_row(&self, i: usize) -> &[f64] {
        self.a1.row(i)
    }

    pub fn kmat_row(&self, i: usize) -> &[f64] {
        self.kmat.row(i)
    }

    /// U = a0 · φ
    pub fn apply_green0(&self, phi: &[f64]) -> Vec<f64> {
        self.a0.matvec(phi)
    }

    /// V = a1 · φ
    pub fn apply_green1(&self, phi: &[f64]) -> Vec<f64> {
        self.a1.matvec(phi)
    }

    /// Z = kmat · U
    pub fn apply_kernel(&self, u: &[f64]) -> Vec<f64> {
        self.kmat.matvec(u)
    }
}
