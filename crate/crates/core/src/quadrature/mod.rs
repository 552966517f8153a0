//! Adaptive numerical integration.
//!
//! One-dimensional intervals (Gauss-Kronrod 7-15, worst-first refinement,
//! exponential substitution for declared endpoint singularities), radial
//! ball and whole-space integrals, axisymmetric half-space integrals with
//! singular-point refinement around the pole `(0,1)`, and the superlevel-set
//! integrals defining the transplantation correction term.

mod axisym;
mod gk;
mod superlevel;

pub use axisym::{integrate_axisym_box, integrate_halfspace_axisym, PoleModel, Rect};
pub use superlevel::superlevel_integral;

use crate::special::sphere_area;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerances and budgets for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Radius of the excluded disc around the pole `(0,1)`; the excluded
    /// mass is restored from the declared singularity model.
    pub pole_exclusion: f64,
    /// Cut-off radius for improper integrals.
    pub truncation: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 40,
            pole_exclusion: 1e-6,
            truncation: 1e6,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.pole_exclusion > 0.0 && self.truncation > 0.0)
        {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if self.max_depth < 4 {
            return Err(Error::Domain("max_depth must be at least 4".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel: f64) -> Self {
        self.rel_tol = rel;
        self
    }

    /// Derived spec for inner integrals of nested quadratures.
    pub(crate) fn tighter(&self, factor: f64) -> Self {
        QuadSpec {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

impl IntegralResult {
    pub(crate) fn zero() -> Self {
        IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    pub(crate) fn merge(&mut self, other: &IntegralResult) {
        self.value += other.value;
        self.error_estimate += other.error_estimate;
        self.evaluations += other.evaluations;
        self.converged &= other.converged;
    }

    /// The value, or an error if the estimate did not converge.
    pub fn require_converged(&self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Unconverged {
                value: self.value,
                error_estimate: self.error_estimate,
            })
        }
    }
}

/// Endpoint classification for 1-D integrands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Regular,
    /// Integrable power or log singularity at this endpoint.
    Singular,
}

/// Adaptive integral of `f` over `[a, b]` with regular endpoints.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<IntegralResult> {
    integrate_1d_singular(f, a, b, (Endpoint::Regular, Endpoint::Regular), spec)
}

/// Adaptive integral with declared endpoint behaviour.
pub fn integrate_1d_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    endpoints: (Endpoint, Endpoint),
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    Ok(match endpoints {
        (Endpoint::Regular, Endpoint::Regular) => gk::adaptive_pieces(&f, &[(a, b)], spec),
        (Endpoint::Singular, Endpoint::Regular) => gk::integrate_singular_left(&f, a, b, spec),
        (Endpoint::Regular, Endpoint::Singular) => gk::integrate_singular_right(&f, a, b, spec),
        (Endpoint::Singular, Endpoint::Singular) => {
            let mid = 0.5 * (a + b);
            let mut left = gk::integrate_singular_left(&f, a, mid, spec);
            let right = gk::integrate_singular_right(&f, mid, b, spec);
            left.merge(&right);
            left
        }
    })
}

/// Improper integral over `[a, inf)` with dyadic tail acceptance.
pub fn integrate_1d_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadSpec) -> Result<IntegralResult> {
    spec.validate()?;
    Ok(gk::integrate_to_inf(&f, a, spec))
}

/// Splits `[a, b]` at the interior breakpoints and integrates piece by
/// piece; the endpoint declarations apply to the outermost pieces.
pub fn integrate_1d_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    endpoints: (Endpoint, Endpoint),
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let mut knots: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let mut edges = Vec::with_capacity(knots.len() + 2);
    edges.push(a);
    edges.extend_from_slice(&knots);
    edges.push(b);

    let mut acc = IntegralResult::zero();
    for w in edges.windows(2) {
        let left_end = if w[0] == a { endpoints.0 } else { Endpoint::Regular };
        let right_end = if w[1] == b { endpoints.1 } else { Endpoint::Regular };
        let piece = integrate_1d_singular(&f, w[0], w[1], (left_end, right_end), spec)?;
        acc.merge(&piece);
    }
    Ok(acc)
}

/// `omega_{n-1} int_0^1 g(t) t^{n-1} dt`, the radial reduction of a ball
/// integral; `g` may blow up (integrably) at `t = 0`.
pub fn integrate_radial_ball<F: Fn(f64) -> f64>(
    n: u32,
    g: F,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    let omega = sphere_area(n)?;
    let nf = n as f64;
    let mut res = integrate_1d_with_breaks(
        |t| g(t) * t.powf(nf - 1.0),
        0.0,
        1.0,
        breaks,
        (Endpoint::Singular, Endpoint::Regular),
        spec,
    )?;
    res.value *= omega;
    res.error_estimate *= omega;
    Ok(res)
}

/// `omega_{n-1} int_0^inf g(r) r^{n-1} dr` with the dyadic truncation
/// policy.
pub fn integrate_radial_rn<F: Fn(f64) -> f64>(
    n: u32,
    g: F,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    let omega = sphere_area(n)?;
    let nf = n as f64;
    let f = |r: f64| g(r) * r.powf(nf - 1.0);
    // handle all breakpoints on a finite head interval, then the dyadic tail
    let cut = breaks
        .iter()
        .copied()
        .filter(|t| t.is_finite() && *t > 0.0)
        .fold(1.0f64, f64::max);
    let mut res = integrate_1d_with_breaks(
        f,
        0.0,
        cut,
        breaks,
        (Endpoint::Singular, Endpoint::Regular),
        spec,
    )?;
    let tail = gk::integrate_to_inf(&f, cut, spec);
    res.merge(&tail);
    res.value *= omega;
    res.error_estimate *= omega;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{assert_abs, assert_rel};
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_singular_1d() {
        let spec = QuadSpec::default();
        let r = integrate_1d(|t| t * t, 0.0, 1.0, &spec).unwrap();
        assert!(r.converged);
        assert_rel(r.value, 1.0 / 3.0, 1e-12);

        let r = integrate_1d_singular(
            |t| t.powf(-0.5),
            0.0,
            1.0,
            (Endpoint::Singular, Endpoint::Regular),
            &spec,
        )
        .unwrap();
        assert!(r.converged);
        assert_rel(r.value, 2.0, 1e-10);

        // critical-Hardy integrand shape: antiderivative 1/log(1/t).  The
        // borderline tail carries mass below the double range: the result
        // must cover the truth with its error bar and refuse to claim
        // convergence at the default tolerance.
        let r = integrate_1d_singular(
            |t| (1.0 / t) * (1.0 / t).ln().powi(-2),
            0.0,
            (-1.0f64).exp(),
            (Endpoint::Singular, Endpoint::Regular),
            &spec,
        )
        .unwrap();
        assert!(!r.converged);
        assert!((r.value - 1.0).abs() <= 3.0 * r.error_estimate);
        assert!(r.error_estimate <= 6e-3, "err={:e}", r.error_estimate);
        assert_rel(r.value, 1.0, 2e-3);
    }

    #[test]
    fn improper_tail() {
        let spec = QuadSpec::default();
        let r = integrate_1d_to_inf(|t| (-t).exp(), 0.0, &spec).unwrap();
        assert!(r.converged);
        assert_rel(r.value, 1.0, 1e-10);
        let r = integrate_1d_to_inf(|t| t.powi(-3), 1.0, &spec).unwrap();
        assert!(r.converged);
        assert_rel(r.value, 0.5, 1e-8);
    }

    #[test]
    fn radial_ball_examples() {
        let spec = QuadSpec::default();
        let r = integrate_radial_ball(3, |_| 1.0, &[], &spec).unwrap();
        assert_rel(r.value, 4.0 * PI / 3.0, 1e-10);
        let r = integrate_radial_ball(2, |t| 1.0 / t, &[], &spec).unwrap();
        assert_rel(r.value, 2.0 * PI, 1e-10);
        // v = 1 - t^2 has |v'|^2 = 4 t^2
        let r = integrate_radial_ball(3, |t| 4.0 * t * t, &[], &spec).unwrap();
        assert_rel(r.value, 16.0 * PI / 5.0, 1e-10);
    }

    #[test]
    fn radial_rn_examples() {
        let spec = QuadSpec::default();
        let r = integrate_radial_rn(2, |t| (-t * t).exp(), &[], &spec).unwrap();
        assert!(r.converged);
        assert_rel(r.value, PI, 1e-9);
        let r = integrate_radial_rn(3, |t| (1.0 + t * t).powi(-3), &[], &spec).unwrap();
        assert_rel(r.value, PI * PI / 4.0, 1e-9);
        // compactly supported: exact truncation
        let r = integrate_radial_rn(3, |t| if t < 1.0 { 1.0 } else { 0.0 }, &[1.0], &spec).unwrap();
        assert_rel(r.value, 4.0 * PI / 3.0, 1e-9);
    }

    #[test]
    fn breakpoints_keep_kinks_cheap() {
        let spec = QuadSpec::default();
        let f = |t: f64| if t < 0.5 { t } else { 1.0 - t };
        let with = integrate_1d_with_breaks(f, 0.0, 1.0, &[0.5], (Endpoint::Regular, Endpoint::Regular), &spec).unwrap();
        assert_rel(with.value, 0.25, 1e-12);
        assert!(with.converged);
    }

    #[test]
    fn axisym_box_examples() {
        let spec = QuadSpec::default();
        // quarter square indicator, n = 2: measure weight is the constant 2
        let r = integrate_axisym_box(2, |_, _| 1.0, Rect::new(0.0, 1.0, 0.0, 1.0), None, &spec).unwrap();
        assert_rel(r.value, 2.0, 1e-12);
    }

    #[test]
    fn halfspace_gaussian() {
        let spec = QuadSpec::default();
        let r = integrate_halfspace_axisym(3, |r_, y| (-r_ * r_ - y * y).exp(), None, None, None, &spec)
            .unwrap();
        assert!(r.converged);
        assert_rel(r.value, PI.powf(1.5) / 2.0, 1e-8);
    }

    #[test]
    fn halfspace_ball_volume_indicator() {
        // ball of radius 1/2 around (0,1), clear of the boundary
        let spec = QuadSpec::default().with_rel_tol(1e-3);
        let ind = |r: f64, y: f64| {
            if r * r + (y - 1.0) * (y - 1.0) < 0.25 {
                1.0
            } else {
                0.0
            }
        };
        let r = integrate_halfspace_axisym(
            3,
            ind,
            None,
            Some(Rect::new(0.0, 0.55, 0.4, 1.6)),
            Some(0.1),
            &spec,
        )
        .unwrap();
        let truth = 4.0 * PI / 3.0 * 0.125;
        assert!(
            (r.value - truth).abs() <= 3.0 * r.error_estimate.max(1e-3 * truth),
            "value {} truth {} err {}",
            r.value,
            truth,
            r.error_estimate
        );
    }

    #[test]
    fn pole_model_power() {
        // f = d^{-beta} (1 - (d/rho0)^2)^3 inside d < rho0, zero outside;
        // closed form omega_{n-1} rho0^{n-beta} B((n-beta)/2, 4) / 2
        let spec = QuadSpec::default().with_rel_tol(1e-7);
        for (n, beta) in [(3u32, 1.5f64), (3, 2.5), (4, 3.5), (2, 1.2)] {
            let rho0 = 0.5;
            let f = move |r: f64, y: f64| {
                let d2 = r * r + (y - 1.0) * (y - 1.0);
                if d2 >= rho0 * rho0 {
                    return 0.0;
                }
                let d = d2.sqrt();
                d.powf(-beta) * (1.0 - d2 / (rho0 * rho0)).powi(3)
            };
            let res = integrate_halfspace_axisym(
                n,
                f,
                Some(PoleModel::Power { beta }),
                Some(Rect::new(0.0, 0.55, 0.45, 1.55)),
                Some(0.15),
                &spec,
            )
            .unwrap();
            let nf = n as f64;
            let a = nf - beta;
            let b_fn = crate::special::gamma(a / 2.0).unwrap() * crate::special::gamma(4.0).unwrap()
                / crate::special::gamma(a / 2.0 + 4.0).unwrap();
            let truth = crate::special::sphere_area(n).unwrap() * rho0.powf(a) * 0.5 * b_fn;
            assert!(
                (res.value - truth).abs() <= 3.0 * res.error_estimate.max(1e-7 * truth),
                "(n,beta)=({n},{beta}): value {} truth {truth} err {}",
                res.value,
                res.error_estimate
            );
            assert_rel(res.value, truth, 1e-5);
        }
    }

    #[test]
    fn pole_model_log() {
        // f = d^{-n} log(2/d)^{-2} (smooth cubic window); reduce to 1-D as
        // an independent oracle
        let spec = QuadSpec::default().with_rel_tol(1e-7);
        let n = 2u32;
        let rho0 = 0.5;
        let f = move |r: f64, y: f64| {
            let d2 = r * r + (y - 1.0) * (y - 1.0);
            if d2 >= rho0 * rho0 {
                return 0.0;
            }
            let d = d2.sqrt();
            d.powi(-(n as i32)) * (2.0 / d).ln().powi(-2) * (1.0 - d2 / (rho0 * rho0)).powi(3)
        };
        let res = integrate_halfspace_axisym(
            n,
            f,
            Some(PoleModel::PowerLog { beta: n as f64, gamma: 2.0 }),
            Some(Rect::new(0.0, 0.55, 0.45, 1.55)),
            Some(0.15),
            &spec,
        )
        .unwrap();
        // 1-D radial oracle in the substituted variable u = log(2/d):
        // omega_{n-1} int_{u0}^inf u^{-2} w(2 e^{-u}) du
        let oracle = integrate_1d_to_inf(
            |u: f64| {
                let d = 2.0 * (-u).exp();
                crate::special::sphere_area(n).unwrap()
                    * u.powi(-2)
                    * (1.0 - d * d / (rho0 * rho0)).max(0.0).powi(3)
            },
            (2.0 / rho0).ln(),
            &QuadSpec {
                rel_tol: 1e-7,
                truncation: 1e9,
                ..QuadSpec::default()
            },
        )
        .unwrap();
        assert!(oracle.converged, "oracle err {:e}", oracle.error_estimate);
        assert_rel(res.value, oracle.value, 2e-5);
    }

    #[test]
    fn missing_singularity_is_reported() {
        let spec = QuadSpec::default();
        let f = |r: f64, y: f64| {
            let d2 = r * r + (y - 1.0) * (y - 1.0);
            if d2 < 0.25 { d2.sqrt().powf(-2.5) } else { 0.0 }
        };
        let err = integrate_halfspace_axisym(3, f, None, Some(Rect::new(0.0, 0.55, 0.45, 1.55)), None, &spec);
        assert_eq!(err.unwrap_err(), crate::Error::MissingSingularity);
    }

    #[test]
    fn superlevel_zero_cases_and_sign() {
        use crate::potentials::PotentialContext;
        let spec = QuadSpec::default().with_rel_tol(1e-6);
        let ctx2 = PotentialContext::new(4, 2.0).unwrap();
        let ctxn = PotentialContext::new(4, 4.0).unwrap();
        for s in [0.1, 1.0, 5.0] {
            assert_eq!(superlevel_integral(&ctx2, s, &spec).unwrap().value, 0.0);
            assert_eq!(superlevel_integral(&ctxn, s, &spec).unwrap().value, 0.0);
        }
        assert!(superlevel_integral(&ctx2, -1.0, &spec).is_err());

        // corrected sign law: F_p <= 0 for p in (2, n), >= 0 for p in (1, 2)
        let ctx = PotentialContext::new(5, 3.0).unwrap();
        let f1 = superlevel_integral(&ctx, 1.0, &spec).unwrap();
        assert!(f1.converged);
        assert!(f1.value < 0.0, "F_3(1) = {}", f1.value);
        let ctx_low = PotentialContext::new(3, 1.5).unwrap();
        let f2 = superlevel_integral(&ctx_low, 1.0, &spec).unwrap();
        assert!(f2.converged);
        assert!(f2.value > 0.0, "F_1.5(1) = {}", f2.value);
    }

    #[test]
    fn superlevel_monotone_in_level() {
        use crate::potentials::PotentialContext;
        let spec = QuadSpec::default().with_rel_tol(1e-6);
        let ctx = PotentialContext::new(5, 3.0).unwrap();
        // for p > 2 (F <= 0), F is nondecreasing in s toward zero
        let grid = [0.1, 0.5, 1.0, 5.0];
        let vals: Vec<f64> = grid
            .iter()
            .map(|&s| superlevel_integral(&ctx, s, &spec).unwrap().value)
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "not nondecreasing: {vals:?}");
        }
        assert!(*vals.last().unwrap() < 0.0);
    }

    #[test]
    fn quad_spec_validation() {
        assert!(QuadSpec { rel_tol: -1.0, ..Default::default() }.validate().is_err());
        assert!(QuadSpec { max_depth: 2, ..Default::default() }.validate().is_err());
        assert!(QuadSpec::default().validate().is_ok());
    }
}
