//! The two independent routes to half-space integrals of symmetric
//! functions must agree: direct axisymmetric quadrature versus the
//! base-domain integral plus the superlevel correction term.  Each side is
//! the other's oracle.

use hardylab::exec::Exec;
use hardylab::potentials::PotentialContext;
use hardylab::quadrature::QuadSpec;
use hardylab::testing::rel_err;
use hardylab::transplant::*;

fn ball_bump(a: f64, b: f64) -> RadialProfile {
    // C^1 bump supported on [a, b] inside (0, 1)
    RadialProfile::new(
        move |t| {
            if t <= a || t >= b {
                0.0
            } else {
                let s = (t - a) / (b - a);
                (s * (1.0 - s)).powi(2) * 16.0
            }
        },
        move |t| {
            if t <= a || t >= b {
                0.0
            } else {
                let s = (t - a) / (b - a);
                32.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (b - a)
            }
        },
        1.0,
        vec![a, b],
    )
    .unwrap()
}

fn smooth_ball(k: i32) -> RadialProfile {
    RadialProfile::new(
        move |t| (1.0 - t * t).powi(k),
        move |t| -2.0 * k as f64 * t * (1.0 - t * t).powi(k - 1),
        1.0,
        vec![],
    )
    .unwrap()
}

fn gaussian_rn(scale: f64) -> RadialProfile {
    RadialProfile::new(
        move |r| (-(r / scale) * (r / scale)).exp(),
        move |r| -2.0 * r / (scale * scale) * (-(r / scale) * (r / scale)).exp(),
        f64::INFINITY,
        vec![],
    )
    .unwrap()
}

#[test]
fn critical_energy_is_preserved() {
    // at p = n the correction vanishes and transplantation is an isometry
    let spec = QuadSpec::default().with_rel_tol(1e-7);
    for n in [2u32, 3] {
        let ctx = PotentialContext::new(n, n as f64).unwrap();
        for v in [smooth_ball(2), smooth_ball(3), ball_bump(0.2, 0.8)] {
            let u = transplant_from_ball(ctx, &v).unwrap();
            let pair = dirichlet_energy_symmetric(&u, None, &spec).unwrap();
            let ball = profile_energy_radial(n, n as f64, &v, &spec).unwrap();
            assert!(pair.direct.converged, "n={n}");
            let err = rel_err(pair.direct.value, ball.value);
            assert!(
                err <= 1e-4,
                "n={n}: direct {} vs ball {} (rel {err:.2e})",
                pair.direct.value,
                ball.value
            );
            assert!(rel_err(pair.via_identity.value, ball.value) <= 1e-6);
        }
    }
}

#[test]
fn quadratic_case_needs_no_correction() {
    // p = 2: the reflected solution is the true Green function
    let spec = QuadSpec::default().with_rel_tol(1e-7);
    let ctx = PotentialContext::new(4, 2.0).unwrap();
    let u = transplant_from_ball(ctx, &smooth_ball(2)).unwrap();
    let pair = dirichlet_energy_symmetric(&u, None, &spec).unwrap();
    assert!(rel_err(pair.direct.value, pair.via_identity.value) <= 1e-4);

    let hardy = hardy_side_symmetric(&u, None, &spec).unwrap();
    assert!(
        rel_err(hardy.direct.value, hardy.via_identity.value) <= 1e-4,
        "direct {} vs plain {}",
        hardy.direct.value,
        hardy.via_identity.value
    );
}

#[test]
fn energy_identity_with_correction() {
    // Dirichlet energy: direct quadrature vs ball energy + F_p correction
    let spec = QuadSpec::default().with_rel_tol(1e-7);
    let table_spec = QuadSpec::default().with_rel_tol(1e-7);
    for (n, p) in [(4u32, 2.5f64), (5, 3.0), (6, 3.5)] {
        let ctx = PotentialContext::new(n, p).unwrap();
        let table = FpTable::build(&ctx, 1e-6, 1e5, 64, Exec::auto(), &table_spec).unwrap();
        for v in [smooth_ball(2), ball_bump(0.15, 0.75), ball_bump(0.4, 0.95)] {
            let u = transplant_from_ball(ctx, &v).unwrap();
            let pair = dirichlet_energy_symmetric(&u, Some(&table), &spec).unwrap();
            let err = rel_err(pair.direct.value, pair.via_identity.value);
            assert!(
                err <= 1e-3,
                "(n,p)=({n},{p}): direct {} vs identity {} (rel {err:.2e})",
                pair.direct.value,
                pair.via_identity.value
            );
        }
    }
}

#[test]
fn hardy_identity_with_correction() {
    // weighted integral: direct V_p^{p/2} d^{-p} quadrature vs the
    // whole-space route with the F_p correction
    let spec = QuadSpec::default().with_rel_tol(1e-7);
    for (n, p) in [(4u32, 2.5f64), (5, 3.0)] {
        let ctx = PotentialContext::new(n, p).unwrap();
        let table = FpTable::build(&ctx, 1e-6, 1e5, 64, Exec::auto(), &spec).unwrap();
        for w in [gaussian_rn(1.0), gaussian_rn(2.5)] {
            let u = transplant_from_rn(ctx, &w).unwrap();
            let pair = hardy_side_symmetric(&u, Some(&table), &spec).unwrap();
            let err = rel_err(pair.direct.value, pair.via_identity.value);
            assert!(
                err <= 1e-3,
                "(n,p)=({n},{p}): direct {} vs identity {} (rel {err:.2e})",
                pair.direct.value,
                pair.via_identity.value
            );
        }
    }
}
