//! Superlevel-set integrals `F_p(s) = int_{[U_p > s]} (-Delta_p U_p)`.
//!
//! The fundamental solution is strictly decreasing in `r` at fixed height,
//! so the superlevel region is `{(r, y) : y^-(s) < y < y^+(s), r < r_s(y)}`
//! with the slice radius found by bisection; the region is contained in the
//! ball of radius `(C(n,p)/s)^{(p-1)/(n-p)}` around the pole.  The integral
//! is then a nested adaptive quadrature with exactly resolved boundary.

use super::axisym::axisym_weight;
use super::gk;
use super::{IntegralResult, QuadSpec};
use crate::potentials::{HalfSpacePoint, PotentialContext};
use crate::{Error, Result};
use std::cell::Cell;

/// Radius of a ball around the pole guaranteed to contain `[U_p >= s]`
/// (from `U_p <= C(n,p) d_-^{-kappa}`).
pub fn superlevel_bounding_radius(ctx: &PotentialContext, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("level s = {s} must be positive")));
    }
    let c = ctx.c_np()?;
    let expo = 1.0 / ctx.kappa();
    Ok((c / s).powf(expo))
}

fn axis_value(ctx: &PotentialContext, y: f64) -> f64 {
    ctx.u(&HalfSpacePoint { r: 0.0, y }).unwrap_or(f64::INFINITY)
}

/// Bisection root of `U(0, y) = s` on a bracket with `U(0,a) - s` and
/// `U(0,b) - s` of opposite sign.
fn bisect_axis(ctx: &PotentialContext, s: f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if (axis_value(ctx, mid) - s) * (axis_value(ctx, a) - s) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Root of `U(r, y) = s` in `r`, with `U(0,y) > s >= U(r_hi, y)`.
fn bisect_radius(ctx: &PotentialContext, s: f64, y: f64, mut hi: f64) -> f64 {
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let val = ctx
            .u(&HalfSpacePoint { r: mid, y })
            .unwrap_or(f64::INFINITY);
        if val > s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn superlevel_integral(
    ctx: &PotentialContext,
    s: f64,
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("level s = {s} must be positive")));
    }
    if ctx.p == 2.0 || ctx.is_critical() {
        // the integrand is identically zero
        return Ok(IntegralResult::zero());
    }

    let delta = superlevel_bounding_radius(ctx, s)?;
    if !delta.is_finite() {
        return Err(Error::Domain(format!(
            "superlevel region unbounded in double precision at s = {s}"
        )));
    }

    // bracket the axis crossings
    let mut hi = 1.0 + 1.0001 * delta;
    for _ in 0..64 {
        if axis_value(ctx, hi) < s {
            break;
        }
        hi = 1.0 + 2.0 * (hi - 1.0);
    }
    let mut lo = (1.0 - 1.0001 * delta).max(1e-14);
    for _ in 0..64 {
        if axis_value(ctx, lo) < s {
            break;
        }
        lo *= 0.5;
    }
    let y_top = bisect_axis(ctx, s, hi, 1.0 + 1e-14);
    let y_bot = bisect_axis(ctx, s, lo, 1.0 - 1e-14);

    let inner_spec = spec.tighter(64.0);
    let weight = axisym_weight(ctx.n)?;
    let nf = ctx.nf();
    let evals = Cell::new(0u64);
    let inner_ok = Cell::new(true);

    let slice = |y_raw: f64| -> f64 {
        // the slice value is continuous across y = 1; evaluating a hair away
        // keeps the closed form clear of spurious overflow
        let y = if (y_raw - 1.0).abs() < 1e-13 {
            1.0 + (y_raw - 1.0).signum() * 1e-13
        } else {
            y_raw
        };
        if y <= 0.0 || y <= y_bot || y >= y_top {
            return 0.0;
        }
        if axis_value(ctx, y) <= s {
            return 0.0;
        }
        let r_cap = {
            let room = (1.0001 * delta) * (1.0001 * delta) - (y - 1.0) * (y - 1.0);
            if room <= 0.0 {
                return 0.0;
            }
            room.sqrt()
        };
        let r_s = bisect_radius(ctx, s, y, r_cap);
        if r_s <= 0.0 {
            return 0.0;
        }
        let g = |r: f64| {
            let v = ctx
                .p_laplacian_u(&HalfSpacePoint { r, y })
                .unwrap_or(f64::NAN);
            v * r.powf(nf - 2.0)
        };
        let res = gk::adaptive_pieces(&g, &[(0.0, r_s)], &inner_spec);
        evals.set(evals.get() + res.evaluations);
        if !res.converged {
            inner_ok.set(false);
        }
        res.value
    };

    // substitution toward the mild kink at the pole height y = 1
    let below = gk::integrate_singular_right(&slice, y_bot, 1.0, spec);
    let above = gk::integrate_singular_left(&slice, 1.0, y_top, spec);

    let mut total = IntegralResult::zero();
    total.merge(&below);
    total.merge(&above);
    total.value *= weight;
    total.error_estimate *= weight;
    total.error_estimate += total.value.abs() * inner_spec.rel_tol * 4.0;
    total.evaluations += evals.get();
    total.converged &= inner_ok.get();
    Ok(total)
}
