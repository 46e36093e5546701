//! Existence/uniqueness certificates for the fixed-point operator.
//!
//! The operator is a contraction on the ball of radius M whenever
//! q = L0·M0 + L1·M1 + L2·M0·M2 < 1, where the L's are Lipschitz constants of
//! f on the box D_M and M2 bounds the kernel integral. (One published variant
//! of the positive-solution condition drops the M0 factor from the L2 term;
//! that form is inconsistent with the q values of both worked examples and is
//! treated as a misprint. This module uses the M0·M2 form everywhere.)
//!
//! Certification is advisory: the solver runs regardless of the verdict.

use crate::error::{Error, Result};
use crate::kernels::{kernel_bound_m2, M0, M1};
use crate::problem::{DomainBox, Problem};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::fmt;

/// Grid size used for the internal trapezium estimate of M2.
const M2_GRID: usize = 1000;

/// Fixed seed for the Lipschitz sampler; estimates are deterministic.
const LIPSCHITZ_SEED: u64 = 0x9a0c_5137;

/// User-supplied (or estimated) hypothesis constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionInputs {
    pub m: f64,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub m2: f64,
}

impl ContractionInputs {
    pub fn new(m: f64, l0: f64, l1: f64, l2: f64, m2: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidArgument(format!("M must be positive, got {m}")));
        }
        for (name, v) in [("L0", l0), ("L1", l1), ("L2", l2), ("M2", m2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { m, l0, l1, l2, m2 })
    }
}

/// Outcome of the hypothesis checks. `sup_ok` and `positivity_ok` stay unset
/// until the corresponding sampled checks have been run.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub q: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    #[serde(rename = "M0")]
    pub m0: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    pub u_bound: f64,
    pub v_bound: f64,
    pub z_bound: f64,
    pub contraction_ok: bool,
    pub sup_ok: Option<bool>,
    pub positivity_ok: Option<bool>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q            {:.4e}", self.q)?;
        writeln!(f, "M            {:.4e}", self.m)?;
        writeln!(
            f,
            "L0, L1, L2   {:.4e}, {:.4e}, {:.4e}",
            self.l0, self.l1, self.l2
        )?;
        writeln!(
            f,
            "M0, M1, M2   {:.4e}, {:.4e}, {:.4e}",
            self.m0, self.m1, self.m2
        )?;
        writeln!(f, "|u| bound    {:.4e}", self.u_bound)?;
        writeln!(f, "|u'| bound   {:.4e}", self.v_bound)?;
        writeln!(f, "|Ku| bound   {:.4e}", self.z_bound)?;
        writeln!(
            f,
            "contraction  {}",
            if self.contraction_ok { "ok (q < 1)" } else { "FAILED (q >= 1)" }
        )?;
        let flag = |v: Option<bool>| match v {
            Some(true) => "ok",
            Some(false) => "FAILED",
            None => "not checked",
        };
        writeln!(f, "sup check    {}", flag(self.sup_ok))?;
        write!(f, "positivity   {}", flag(self.positivity_ok))
    }
}

/// Compute q = L0·M0 + L1·M1 + L2·M0·M2 and the solution bounds
/// (M0·M, M1·M, M0·M2·M).
pub fn contraction_check(inputs: &ContractionInputs) -> Certificate {
    let q = inputs.l0 * M0 + inputs.l1 * M1 + inputs.l2 * M0 * inputs.m2;
    Certificate {
        q,
        m: inputs.m,
        l0: inputs.l0,
        l1: inputs.l1,
        l2: inputs.l2,
        m0: M0,
        m1: M1,
        m2: inputs.m2,
        u_bound: M0 * inputs.m,
        v_bound: M1 * inputs.m,
        z_bound: M0 * inputs.m2 * inputs.m,
        contraction_ok: q < 1.0,
        sup_ok: None,
        positivity_ok: None,
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    debug_assert!(count >= 2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn m2_for(problem: &Problem) -> Result<f64> {
    kernel_bound_m2(|x, t| problem.kernel(x, t), M2_GRID)
}

struct BoxScan {
    max_abs: f64,
    min_f: f64,
    forcing_max: f64,
}

// Tensor-product scan of f over the box; endpoints (corners) are always
// sampled. `forcing_max` tracks max_x |f(x,0,0,0)|.
fn scan_box(problem: &Problem, b: &DomainBox, density: usize) -> Result<BoxScan> {
    let xs = linspace(0.0, 1.0, density);
    let us = linspace(b.u_lo(), b.u_bound, density);
    let vs = linspace(-b.v_bound, b.v_bound, density);
    let zs = linspace(-b.z_bound, b.z_bound, density);
    let mut scan = BoxScan {
        max_abs: 0.0,
        min_f: f64::INFINITY,
        forcing_max: 0.0,
    };
    for &x in &xs {
        scan.forcing_max = scan.forcing_max.max(problem.f(x, 0.0, 0.0, 0.0)?.abs());
        for &u in &us {
            for &v in &vs {
                for &z in &zs {
                    let fv = problem.f(x, u, v, z).map_err(|e| {
                        Error::Eval(format!("f({x}, {u}, {v}, {z}): {e}"))
                    })?;
                    if !fv.is_finite() {
                        return Err(Error::Eval(format!(
                            "f({x}, {u}, {v}, {z}) evaluated to a non-finite value"
                        )));
                    }
                    scan.max_abs = scan.max_abs.max(fv.abs());
                    scan.min_f = scan.min_f.min(fv);
                }
            }
        }
    }
    Ok(scan)
}

fn check_density(density: usize) -> Result<()> {
    if density < 2 {
        return Err(Error::InvalidArgument(format!(
            "sampling density must be at least 2 per axis, got {density}"
        )));
    }
    Ok(())
}

/// Sampled sup of |f| over D_M on a `density`-per-axis tensor grid; M2 is
/// estimated from the kernel by trapezium quadrature. Returns the estimate
/// and whether it stays within M.
pub fn sup_f_check(problem: &Problem, m: f64, density: usize) -> Result<(f64, bool)> {
    check_density(density)?;
    let b = DomainBox::new(m, m2_for(problem)?, false)?;
    let scan = scan_box(problem, &b, density)?;
    Ok((scan.max_abs, scan.max_abs <= m))
}

/// Sampled check of the positive-solution hypotheses on D_M⁺: f nonnegative,
/// sup |f| within M, and f(·,0,0,0) not identically zero.
pub fn positivity_check(problem: &Problem, m: f64, density: usize) -> Result<bool> {
    check_density(density)?;
    let b = DomainBox::new(m, m2_for(problem)?, true)?;
    let scan = scan_box(problem, &b, density)?;
    Ok(scan.min_f >= 0.0 && scan.max_abs <= m && scan.forcing_max > 0.0)
}

/// Lower estimates of the per-argument Lipschitz constants (L0, L1, L2) of f
/// over D_M, via maximum one-coordinate secant quotients at random points.
///
/// These are lower bounds by construction; user-supplied analytic constants
/// take precedence in certification.
pub fn lipschitz_estimate(problem: &Problem, m: f64, samples: usize) -> Result<(f64, f64, f64)> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 samples, got {samples}"
        )));
    }
    let b = DomainBox::new(m, m2_for(problem)?, false)?;
    let mut rng = StdRng::seed_from_u64(LIPSCHITZ_SEED);
    let draw = |lo: f64, hi: f64, rng: &mut StdRng| {
        if hi > lo {
            rng.gen_range(lo..=hi)
        } else {
            lo
        }
    };

    let mut bounds = [0.0f64; 3];
    for (arg, bound) in bounds.iter_mut().enumerate() {
        for _ in 0..samples {
            let x = draw(0.0, 1.0, &mut rng);
            let u = draw(-b.u_bound, b.u_bound, &mut rng);
            let v = draw(-b.v_bound, b.v_bound, &mut rng);
            let z = draw(-b.z_bound, b.z_bound, &mut rng);
            let (lo, hi) = match arg {
                0 => (-b.u_bound, b.u_bound),
                1 => (-b.v_bound, b.v_bound),
                _ => (-b.z_bound, b.z_bound),
            };
            let second = draw(lo, hi, &mut rng);
            let (p1, p2) = match arg {
                0 => ((x, u, v, z), (x, second, v, z)),
                1 => ((x, u, v, z), (x, u, second, z)),
                _ => ((x, u, v, z), (x, u, v, second)),
            };
            let delta = (p2.1 - p1.1).abs().max((p2.2 - p1.2).abs()).max((p2.3 - p1.3).abs());
            if delta < 1e-12 {
                continue;
            }
            let f1 = problem.f(p1.0, p1.1, p1.2, p1.3)?;
            let f2 = problem.f(p2.0, p2.1, p2.2, p2.3)?;
            if !f1.is_finite() || !f2.is_finite() {
                return Err(Error::Eval(format!(
                    "f evaluated to a non-finite value near x = {x}"
                )));
            }
            *bound = bound.max((f2 - f1).abs() / delta);
        }
    }
    Ok((bounds[0], bounds[1], bounds[2]))
}

/// Geometric error envelope after m iterations: p_m = qᵐ/(1−q), returning
/// (M0·p_m·d, M1·p_m·d) for the solution and its derivative.
pub fn apriori_bound(q: f64, d: f64, m: u32) -> Result<(f64, f64)> {
    if !(q.is_finite() && (0.0..1.0).contains(&q)) {
        return Err(Error::InvalidArgument(format!(
            "contraction factor must lie in [0, 1), got {q}"
        )));
    }
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "first-step displacement must be nonnegative, got {d}"
        )));
    }
    let p = q.powi(m as i32) / (1.0 - q);
    Ok((M0 * p * d, M1 * p * d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{example1, example2, Problem};
    use std::f64::consts::{E, PI};
    use std::sync::Arc;

    fn example1_inputs() -> ContractionInputs {
        ContractionInputs::new(113.0, 12.2010, 1.4714, 2.1649, 2.0 * E / PI).unwrap()
    }

    fn example2_inputs() -> ContractionInputs {
        ContractionInputs::new(1.1, 2.0515e-4, 0.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn contraction_example1() {
        let c = contraction_check(&example1_inputs());
        assert!((c.q - 0.2690).abs() <= 1e-4, "q = {}", c.q);
        assert!((c.u_bound - 1.4714).abs() <= 1e-3);
        assert!((c.v_bound - 4.7083).abs() <= 1e-3);
        assert!(c.contraction_ok);
        assert!(c.sup_ok.is_none() && c.positivity_ok.is_none());
    }

    #[test]
    fn contraction_example2() {
        let c = contraction_check(&example2_inputs());
        assert!((c.q - 0.0130).abs() <= 1e-4, "q = {}", c.q);
        assert!((c.u_bound - 0.0143).abs() <= 1e-3);
        assert!((c.v_bound - 0.0458).abs() <= 1e-3);
        assert!(c.contraction_ok);
    }

    #[test]
    fn contraction_zero_lipschitz() {
        let c = contraction_check(&ContractionInputs::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap());
        assert_eq!(c.q, 0.0);
        assert!(c.contraction_ok);
    }

    #[test]
    fn q_recomputable_from_fields() {
        let c = contraction_check(&example1_inputs());
        let q = c.l0 * c.m0 + c.l1 * c.m1 + c.l2 * c.m0 * c.m2;
        assert!((q - c.q).abs() <= 1e-15);
    }

    #[test]
    fn q_monotone_in_each_constant() {
        let base = contraction_check(&example2_inputs()).q;
        for bump in [
            ContractionInputs::new(1.1, 3e-4, 0.0, 2.0, 0.5).unwrap(),
            ContractionInputs::new(1.1, 2.0515e-4, 0.1, 2.0, 0.5).unwrap(),
            ContractionInputs::new(1.1, 2.0515e-4, 0.0, 2.5, 0.5).unwrap(),
            ContractionInputs::new(1.1, 2.0515e-4, 0.0, 2.0, 0.9).unwrap(),
        ] {
            assert!(contraction_check(&bump).q >= base);
        }
    }

    #[test]
    fn input_validation() {
        assert!(ContractionInputs::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ContractionInputs::new(1.0, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ContractionInputs::new(1.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn json_keys() {
        let c = contraction_check(&example1_inputs());
        let json = c.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in [
            "q", "M", "L0", "L1", "L2", "M0", "M1", "M2", "u_bound", "v_bound", "z_bound",
            "contraction_ok", "sup_ok", "positivity_ok",
        ] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(v["q"].as_f64().unwrap(), c.q);
        assert!(v["sup_ok"].is_null());
    }

    #[test]
    fn sup_f_example1() {
        let (sup, ok) = sup_f_check(&example1(), 113.0, 20).unwrap();
        // true sampled maximum of |f| on the tensor grid; the corner terms
        // u²z + uv contribute 12.44 on top of the x-profile peak near 96.6
        assert!((sup - 108.934206).abs() <= 1e-4, "sup = {sup}");
        assert!(ok);
        let (sup, ok) = sup_f_check(&example1(), 100.0, 20).unwrap();
        assert!(sup > 100.0, "sup = {sup}");
        assert!(!ok);
    }

    #[test]
    fn sup_f_zero_function() {
        let p = Problem::new(
            "zero",
            Arc::new(|_, _, _, _| Ok(0.0)),
            Arc::new(|_, _| Ok(0.0)),
        );
        let (sup, ok) = sup_f_check(&p, 1.0, 5).unwrap();
        assert_eq!(sup, 0.0);
        assert!(ok);
        assert!(sup_f_check(&p, 1.0, 1).is_err());
        assert!(sup_f_check(&p, -1.0, 5).is_err());
    }

    #[test]
    fn lipschitz_linear_in_u() {
        let p = Problem::new(
            "linear",
            Arc::new(|_, u, _, _| Ok(u)),
            Arc::new(|_, _| Ok(0.0)),
        );
        let (l0, l1, l2) = lipschitz_estimate(&p, 5.0, 2000).unwrap();
        assert!((l0 - 1.0).abs() <= 1e-6, "l0 = {l0}");
        assert!(l1 <= 1e-12);
        assert!(l2 <= 1e-12);
        assert!(lipschitz_estimate(&p, 5.0, 99).is_err());
    }

    #[test]
    fn lipschitz_example2() {
        let (l0, l1, l2) = lipschitz_estimate(&example2(), 1.1, 100_000).unwrap();
        // analytic values: L0 = 2 u_b z_b ≈ 2.0515e-4, L1 = 0, L2 = 2
        assert!(l1 <= 1e-12, "l1 = {l1}");
        assert!((1.99..=2.0 + 1e-12).contains(&l2), "l2 = {l2}");
        assert!(l0 <= 2.0515e-4 * (1.0 + 1e-9), "l0 = {l0} exceeds analytic");
        assert!(l0 >= 1.8e-4, "l0 = {l0} too far below analytic");
    }

    #[test]
    fn positivity_cases() {
        let pos = Problem::new(
            "constant-one",
            Arc::new(|_, _, _, _| Ok(1.0)),
            Arc::new(|_, _| Ok(0.0)),
        );
        assert!(positivity_check(&pos, 1.1, 10).unwrap());

        let zero = Problem::new(
            "zero",
            Arc::new(|_, _, _, _| Ok(0.0)),
            Arc::new(|_, _| Ok(0.0)),
        );
        assert!(!positivity_check(&zero, 1.0, 10).unwrap());

        let neg = Problem::new(
            "minus-one",
            Arc::new(|_, _, _, _| Ok(-1.0)),
            Arc::new(|_, _| Ok(0.0)),
        );
        assert!(!positivity_check(&neg, 1.0, 10).unwrap());
    }

    #[test]
    fn positivity_example2_fails_at_corner() {
        // at x = 0, z = -z_bound the value (2 - u²)z is negative, so the
        // sampled hypothesis f >= 0 on the positive box does not hold
        assert!(!positivity_check(&example2(), 1.1, 20).unwrap());
    }

    #[test]
    fn apriori_values() {
        let (u, v) = apriori_bound(0.5, 1.0, 1).unwrap();
        assert!((u - 5.0 / 384.0).abs() <= 1e-15);
        assert!((v - 1.0 / 24.0).abs() <= 1e-15);

        let (u, _) = apriori_bound(0.5, 1.0, 200).unwrap();
        assert!(u < 1e-60);

        let (u, _) = apriori_bound(0.2690, 1.0, 3).unwrap();
        assert!((u - 3.467e-4).abs() <= 1e-6, "u = {u}");

        assert!(apriori_bound(1.0, 1.0, 1).is_err());
        assert!(apriori_bound(0.5, -1.0, 1).is_err());
    }

    #[test]
    fn apriori_strictly_decreasing_in_m() {
        let mut prev = f64::INFINITY;
        for m in 0..12 {
            let (u, _) = apriori_bound(0.3, 2.0, m).unwrap();
            assert!(u < prev);
            prev = u;
        }
    }

    #[test]
    fn estimate_feeds_contraction_check() {
        let (l0, l1, l2) = lipschitz_estimate(&example2(), 1.1, 20_000).unwrap();
        let m2 = kernel_bound_m2(|x, t| example2().kernel(x, t), 1000).unwrap();
        let c = contraction_check(&ContractionInputs::new(1.1, l0, l1, l2, m2).unwrap());
        assert!((c.q - 0.0130).abs() <= 1e-3, "q = {}", c.q);
        assert!(c.contraction_ok);
    }
}
