//! Adaptive 1-D integration on a Gauss-Kronrod 7-15 pair.
//!
//! Worst-interval-first refinement with the QUADPACK error rescale.
//! Declared endpoint singularities of integrable power/log type are removed
//! by the exponential substitution `t = a + e^{-u}`, which turns the
//! interval into a half-line handled by dyadic shells with tail acceptance.

use super::{IntegralResult, QuadSpec};
use std::collections::BinaryHeap;

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights; the
// embedded 7-point Gauss rule sits on xgk[1], xgk[3], xgk[5], xgk[7].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss-Kronrod 7-15 application; returns (value, error, evaluations).
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, u64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_kronrod = WGK[7] * f_center;
    let mut res_gauss = WG[3] * f_center;
    let mut res_abs = WGK[7] * f_center.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = res_kronrod * half;
    let err = rescale_error((res_kronrod - res_gauss) * half, res_abs * half, res_asc * half);
    (value, err, 15)
}

#[derive(Debug)]
struct Seg {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
    depth: u32,
    seq: u64,
}

impl PartialEq for Seg {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Seg {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap on error; sequence number makes the order total and
        // reproducible
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

const MAX_EVALS_1D: u64 = 4_000_000;

/// Adaptive integration over a list of finite pieces.
pub(crate) fn adaptive_pieces<F: Fn(f64) -> f64>(
    f: &F,
    pieces: &[(f64, f64)],
    spec: &QuadSpec,
) -> IntegralResult {
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut evals = 0u64;
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut frozen_err = 0.0;

    for &(a, b) in pieces {
        if !(b > a) {
            continue;
        }
        let (val, err, ne) = gk15(f, a, b);
        evals += ne;
        total += val;
        total_err += err;
        heap.push(Seg {
            a,
            b,
            val,
            err,
            depth: 0,
            seq,
        });
        seq += 1;
    }

    let tol = |total: f64| (spec.rel_tol * total.abs()).max(spec.abs_tol);

    while total_err + frozen_err > tol(total) && evals < MAX_EVALS_1D {
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= spec.max_depth {
            frozen_err += worst.err;
            total_err -= worst.err;
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen_err += worst.err;
            total_err -= worst.err;
            continue;
        }
        let (v1, e1, n1) = gk15(f, worst.a, mid);
        let (v2, e2, n2) = gk15(f, mid, worst.b);
        evals += n1 + n2;
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Seg {
            a: worst.a,
            b: mid,
            val: v1,
            err: e1,
            depth: worst.depth + 1,
            seq,
        });
        seq += 1;
        heap.push(Seg {
            a: mid,
            b: worst.b,
            val: v2,
            err: e2,
            depth: worst.depth + 1,
            seq,
        });
        seq += 1;
    }

    let err = total_err + frozen_err;
    IntegralResult {
        value: total,
        error_estimate: err,
        evaluations: evals,
        converged: err.is_finite() && total.is_finite() && err <= tol(total),
    }
}

/// Improper integral over `[a, inf)` by dyadic shells: shell `k` covers
/// `[a + 2^k - 1, a + 2^{k+1} - 1]`.  Accepted once two successive shells
/// contribute less than `rel_tol * |total|` (or `abs_tol`); a geometric
/// extrapolation of the remaining tail goes into the error estimate.
pub(crate) fn integrate_to_inf<F: Fn(f64) -> f64>(f: &F, a: f64, spec: &QuadSpec) -> IntegralResult {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0u64;
    let mut small_streak = 0u32;
    let mut prev_mag: Option<f64> = None;
    let mut accepted = false;
    let mut seen_mass = false;
    let mut last_mag = 0.0;

    // shells run at a tighter tolerance so that the accumulated error
    // estimate stays within the caller's budget
    let inner = QuadSpec {
        rel_tol: spec.rel_tol / 8.0,
        abs_tol: spec.abs_tol / 8.0,
        ..*spec
    };
    let mut k = 0u32;
    loop {
        let lo = a + 2f64.powi(k as i32) - 1.0;
        let hi = a + 2f64.powi(k as i32 + 1) - 1.0;
        if lo - a >= spec.truncation {
            break;
        }
        let shell = adaptive_pieces(f, &[(lo, hi)], &inner);
        evals += shell.evaluations;
        total += shell.value;
        err += shell.error_estimate;

        let mag = shell.value.abs();
        if mag > spec.abs_tol {
            seen_mass = true;
        }
        let small = mag <= (spec.rel_tol * total.abs()).max(spec.abs_tol);
        if small {
            small_streak += 1;
        } else {
            small_streak = 0;
        }
        if small_streak >= 2 && seen_mass {
            // geometric tail bound from the observed decay
            let q = match prev_mag {
                Some(p) if p > 0.0 => (mag / p).min(0.9),
                _ => 0.5,
            };
            err += mag * q / (1.0 - q);
            accepted = true;
            break;
        }
        prev_mag = Some(mag);
        last_mag = mag;
        k += 1;
    }

    if !accepted && !seen_mass {
        // nothing but zero shells up to the truncation radius
        accepted = true;
    } else if !accepted {
        err += last_mag; // crude bound for the cut tail
    }
    let tol = (spec.rel_tol * total.abs()).max(spec.abs_tol);
    IntegralResult {
        value: total,
        error_estimate: err,
        evaluations: evals,
        converged: accepted && total.is_finite() && err.is_finite() && err <= tol,
    }
}

/// Finite interval with a declared integrable singularity at the left
/// endpoint: substitute `t = a + e^{-u}`.
///
/// The substituted half-line is capped where `a + e^{-u}` stops being
/// distinguishable from the singular point in doubles (and in any case
/// where reciprocal powers of `e^{-u}` would overflow).  Mass below the cap
/// cannot be sampled; a power-law bound on it goes into the error estimate,
/// so borderline `t^{-1} log^{-gamma}` singularities honestly report
/// `converged = false` at tight tolerances.
pub(crate) fn integrate_singular_left<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> IntegralResult {
    integrate_singular_left_anchored(f, a, b, a.abs(), spec)
}

pub(crate) fn integrate_singular_right<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> IntegralResult {
    integrate_singular_left_anchored(&|t| f(a + b - t), a, b, b.abs(), spec)
}

fn integrate_singular_left_anchored<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    anchor: f64,
    spec: &QuadSpec,
) -> IntegralResult {
    let u_overflow: f64 = 640.0;
    let u_absorb = if anchor == 0.0 {
        f64::INFINITY
    } else {
        -(4.0 * f64::EPSILON * anchor).ln()
    };
    let u_cap_target = u_overflow.min(u_absorb);
    let floor = (-u_cap_target).exp();
    let u0 = -(b - a).ln();
    let g = |u: f64| {
        let t = (-u).exp();
        if t < floor {
            0.0
        } else {
            f(a + t) * t
        }
    };
    let capped = QuadSpec {
        truncation: (u_cap_target - u0).max(16.0),
        ..*spec
    };
    let mut res = integrate_to_inf(&g, u0, &capped);

    // bound the unreachable tail from the observed decay power; with that
    // bound in the estimate, convergence is decided here rather than by the
    // shell acceptance (the cap may cut the shell sequence short)
    let u_cap = u0 + capped.truncation;
    let (gu, uu) = if g(u_cap) != 0.0 {
        (g(u_cap).abs(), u_cap)
    } else {
        (g(0.9 * u_cap).abs(), 0.9 * u_cap)
    };
    if gu > 0.0 && gu.is_finite() {
        let u_probe = (uu / 1.2).max(u0.max(1e-3));
        let g0 = g(u_probe).abs();
        let power = if g0 > gu && u_probe < uu {
            ((g0 / gu).ln() / (uu / u_probe).ln()).max(1.2)
        } else {
            1.2
        };
        res.error_estimate += uu * gu / (power - 1.0).max(0.2);
    }
    let tol = (spec.rel_tol * res.value.abs()).max(spec.abs_tol);
    res.converged = res.value.is_finite()
        && res.error_estimate.is_finite()
        && res.error_estimate <= tol;
    res
}
