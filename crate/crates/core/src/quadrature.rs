//! Composite trapezium rule on the uniform grid over [0, 1].
//!
//! Every integral in this crate goes through this rule; the scheme's O(h²)
//! error guarantee is tied to it.

use crate::error::{Error, Result};

/// Uniform grid x_i = i/N for i = 0..=N, with step h = 1/N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    /// N must be at least 2.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid size must be at least 2, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// Number of subintervals N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, N + 1.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid step h = 1/N.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// i-th node. node(0) = 0 and node(N) = 1 exactly.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        i as f64 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }
}

/// Trapezium weights: rho_0 = rho_N = 1/2, rho_j = 1 otherwise.
pub fn trap_weights(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "trapezium rule needs n >= 2, got {n}"
        )));
    }
    let mut rho = vec![1.0; n + 1];
    rho[0] = 0.5;
    rho[n] = 0.5;
    Ok(rho)
}

/// h * sum of rho_j * samples_j, accumulated left to right.
pub fn integrate(samples: &[f64], grid: &GridSpec) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} samples for N = {}, got {}",
            grid.len(),
            grid.n(),
            samples.len()
        )));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sample at node {i} is not finite"
        )));
    }
    let n = grid.n();
    let mut sum = 0.0;
    for (j, v) in samples.iter().enumerate() {
        let rho = if j == 0 || j == n { 0.5 } else { 1.0 };
        sum += rho * v;
    }
    Ok(grid.h() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_endpoints_exact() {
        for n in [2, 49, 100, 1000] {
            let g = GridSpec::new(n).unwrap();
            assert_eq!(g.node(0), 0.0);
            assert_eq!(g.node(n), 1.0);
            assert!((g.h() * n as f64 - 1.0).abs() <= 1e-15);
            let nodes = g.nodes();
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(GridSpec::new(1).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(trap_weights(2).unwrap(), vec![0.5, 1.0, 0.5]);
        assert_eq!(trap_weights(4).unwrap(), vec![0.5, 1.0, 1.0, 1.0, 0.5]);
        assert!(trap_weights(1).is_err());
        // sum(rho) * h = 1 for any n
        for n in [2, 7, 33] {
            let g = GridSpec::new(n).unwrap();
            let s: f64 = trap_weights(n).unwrap().iter().sum();
            assert!((s * g.h() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn exact_on_linear() {
        let g = GridSpec::new(10).unwrap();
        let ones = vec![1.0; g.len()];
        assert_eq!(integrate(&ones, &g).unwrap(), 1.0);
        let xs: Vec<f64> = g.nodes();
        assert!((integrate(&xs, &g).unwrap() - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn sine_integral() {
        let g = GridSpec::new(100).unwrap();
        let s: Vec<f64> = g.nodes().iter().map(|&x| (PI * x).sin()).collect();
        let v = integrate(&s, &g).unwrap();
        assert!((v - 2.0 / PI).abs() <= 1e-4, "got {v}");
    }

    #[test]
    fn second_order_on_sine() {
        let err = |n: usize| {
            let g = GridSpec::new(n).unwrap();
            let s: Vec<f64> = g.nodes().iter().map(|&x| (PI * x).sin()).collect();
            (integrate(&s, &g).unwrap() - 2.0 / PI).abs()
        };
        let ratio = err(100) / err(200);
        assert!(
            (3.8..=4.2).contains(&ratio),
            "error ratio {ratio} not second order"
        );
    }

    #[test]
    fn linearity() {
        let g = GridSpec::new(37).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|&x| (3.0 * x).cos()).collect();
        let v: Vec<f64> = g.nodes().iter().map(|&x| x * x - 0.3).collect();
        let (a, b) = (2.5, -1.25);
        let combo: Vec<f64> = u.iter().zip(&v).map(|(ui, vi)| a * ui + b * vi).collect();
        let lhs = integrate(&combo, &g).unwrap();
        let rhs = a * integrate(&u, &g).unwrap() + b * integrate(&v, &g).unwrap();
        assert!((lhs - rhs).abs() <= 1e-13);
    }

    #[test]
    fn argument_errors() {
        let g = GridSpec::new(4).unwrap();
        assert!(integrate(&[0.0; 3], &g).is_err());
        assert!(integrate(&[0.0, 1.0, f64::NAN, 0.0, 1.0], &g).is_err());
    }
}
