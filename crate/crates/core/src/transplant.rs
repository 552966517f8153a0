//! Harmonic transplantation.
//!
//! Radial profiles move between the unit ball, balls of any radius, the
//! whole space, the half-line and the half-space by matching Green-function
//! levels.  On the half-space the matching uses the reflected fundamental
//! solution; since that is not the true Green function for `p` strictly
//! between 2 and `n`, the Dirichlet energy picks up a correction driven by
//! the superlevel integral `F_p`, precomputed here on a log-spaced level
//! grid.

use crate::exec::{run_grid, Exec};
use crate::params::Params;
use crate::potentials::{HalfSpacePoint, PotentialContext};
use crate::quadrature::{
    integrate_1d_to_inf, integrate_1d_with_breaks, integrate_halfspace_axisym, superlevel_integral,
    Endpoint, IntegralResult, PoleModel, QuadSpec,
};
use crate::special::sphere_area;
use crate::{Error, Result};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Piecewise-smooth scalar function of one radial variable with an explicit
/// derivative and breakpoint list.
#[derive(Clone)]
pub struct RadialProfile {
    value: ScalarFn,
    derivative: ScalarFn,
    support_end: f64,
    breakpoints: Vec<f64>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("support_end", &self.support_end)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_end: f64,
        mut breakpoints: Vec<f64>,
    ) -> Result<Self> {
        if support_end.is_finite() {
            let trace = value(support_end);
            if trace.abs() > 1e-10 {
                return Err(Error::InvalidProfile(format!(
                    "value at the support end {support_end} is {trace}, not zero"
                )));
            }
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(RadialProfile {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            support_end,
            breakpoints,
        })
    }

    pub(crate) fn from_parts(
        value: ScalarFn,
        derivative: ScalarFn,
        support_end: f64,
        breakpoints: Vec<f64>,
    ) -> Self {
        RadialProfile {
            value,
            derivative,
            support_end,
            breakpoints,
        }
    }

    pub fn zero() -> Self {
        RadialProfile {
            value: Arc::new(|_| 0.0),
            derivative: Arc::new(|_| 0.0),
            support_end: 1.0,
            breakpoints: Vec::new(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t > self.support_end {
            0.0
        } else {
            (self.value)(t)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t > self.support_end {
            0.0
        } else {
            (self.derivative)(t)
        }
    }

    pub fn support_end(&self) -> f64 {
        self.support_end
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// Gradient energy `omega_{n-1} int_0^R |u'|^p r^{n-1} dr` of a radial
/// profile on the ball of radius `R = support_end` (dyadic tail when the
/// support is unbounded).
pub fn profile_energy_radial(
    n: u32,
    p: f64,
    profile: &RadialProfile,
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    let omega = sphere_area(n)?;
    let nf = n as f64;
    let g = |r: f64| profile.derivative(r).abs().powf(p) * r.powf(nf - 1.0);
    let mut res = if profile.support_end.is_finite() {
        integrate_1d_with_breaks(
            g,
            0.0,
            profile.support_end,
            &profile.breakpoints,
            (Endpoint::Singular, Endpoint::Regular),
            spec,
        )?
    } else {
        let cut = profile.breakpoints.iter().copied().fold(1.0f64, f64::max);
        let mut head = integrate_1d_with_breaks(
            &g,
            0.0,
            cut,
            &profile.breakpoints,
            (Endpoint::Singular, Endpoint::Regular),
            spec,
        )?;
        let tail = integrate_1d_to_inf(&g, cut, spec)?;
        head.merge(&tail);
        head
    };
    res.value *= omega;
    res.error_estimate *= omega;
    Ok(res)
}

/// Line energy `int_0^inf |v'|^p dt` of a half-line profile.
pub fn profile_energy_line(p: f64, profile: &RadialProfile, spec: &QuadSpec) -> Result<IntegralResult> {
    let g = |t: f64| profile.derivative(t).abs().powf(p);
    if profile.support_end.is_finite() {
        integrate_1d_with_breaks(
            g,
            0.0,
            profile.support_end,
            &profile.breakpoints,
            (Endpoint::Regular, Endpoint::Regular),
            spec,
        )
    } else {
        let cut = profile.breakpoints.iter().copied().fold(1.0f64, f64::max);
        let mut head = integrate_1d_with_breaks(
            &g,
            0.0,
            cut,
            &profile.breakpoints,
            (Endpoint::Regular, Endpoint::Regular),
            spec,
        )?;
        let tail = integrate_1d_to_inf(&g, cut, spec)?;
        head.merge(&tail);
        Ok(head)
    }
}

/// Function on the half-space of the form `u(x, y) = profile(U_p(x, y))`:
/// constant on the level sets of the fundamental solution, zero on the
/// boundary.
#[derive(Clone, Debug)]
pub struct SymmetricFunction {
    profile: RadialProfile,
    ctx: PotentialContext,
}

impl SymmetricFunction {
    pub fn new(ctx: PotentialContext, profile: RadialProfile) -> Result<Self> {
        if profile.value(0.0).abs() > 1e-10 {
            return Err(Error::InvalidProfile(
                "level profile must vanish at s = 0 (the boundary trace)".into(),
            ));
        }
        Ok(SymmetricFunction { profile, ctx })
    }

    pub fn ctx(&self) -> &PotentialContext {
        &self.ctx
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn value(&self, pt: &HalfSpacePoint) -> Result<f64> {
        Ok(self.profile.value(self.ctx.u(pt)?))
    }

    /// Chain-rule gradient `profile'(U) grad U` in `(r, y)` components.
    pub fn grad(&self, pt: &HalfSpacePoint) -> Result<(f64, f64)> {
        let s = self.ctx.u(pt)?;
        let g = self.ctx.grad_u(pt)?;
        let ds = self.profile.derivative(s);
        Ok((ds * g.dr, ds * g.dy))
    }

    /// The ball-side profile `v(t) = profile(G_ball(t))`.
    pub fn ball_profile(&self) -> RadialProfile {
        let ctx = self.ctx;
        let prof = self.profile.clone();
        let prof_d = self.profile.clone();
        let breaks = self
            .profile
            .breakpoints
            .iter()
            .filter(|&&s| s > 0.0)
            .filter_map(|&s| ctx.green_ball_inv(s).ok())
            .collect();
        RadialProfile::from_parts(
            Arc::new(move |t: f64| {
                if t <= 0.0 {
                    return prof.value(f64::INFINITY);
                }
                ctx.green_ball(t).map(|s| prof.value(s)).unwrap_or(0.0)
            }),
            Arc::new(move |t: f64| {
                let Ok(s) = ctx.green_ball(t) else { return 0.0 };
                // dG/dt = -omega^{-1/(p-1)} t^{-kappa-1}
                let gp = -ctx.omega().powf(-1.0 / (ctx.p - 1.0)) * t.powf(-ctx.kappa() - 1.0);
                prof_d.derivative(s) * gp
            }),
            1.0,
            breaks,
        )
    }

    /// The whole-space-side profile `w(r) = profile(G_rn(r))`; `p < n`.
    pub fn rn_profile(&self) -> Result<RadialProfile> {
        if self.ctx.is_critical() {
            return Err(Error::Domain("whole-space route needs p < n".into()));
        }
        let ctx = self.ctx;
        let prof = self.profile.clone();
        let prof_d = self.profile.clone();
        let breaks = self
            .profile
            .breakpoints
            .iter()
            .filter(|&&s| s > 0.0)
            .filter_map(|&s| ctx.green_rn_inv(s).ok())
            .collect();
        Ok(RadialProfile::from_parts(
            Arc::new(move |r: f64| {
                if r <= 0.0 {
                    return prof.value(f64::INFINITY);
                }
                ctx.green_rn(r).map(|s| prof.value(s)).unwrap_or(0.0)
            }),
            Arc::new(move |r: f64| {
                let Ok(s) = ctx.green_rn(r) else { return 0.0 };
                let gp = -ctx.omega().powf(-1.0 / (ctx.p - 1.0)) * r.powf(-ctx.kappa() - 1.0);
                prof_d.derivative(s) * gp
            }),
            f64::INFINITY,
            breaks,
        ))
    }
}

/// Generalized harmonic transplantation of a radial ball profile:
/// `u(x,y) = v(t)` where `U_p(x,y) = G_ball(t)`.
pub fn transplant_from_ball(ctx: PotentialContext, v: &RadialProfile) -> Result<SymmetricFunction> {
    if !v.support_end.is_finite() || (v.support_end - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProfile("ball profile must live on [0, 1]".into()));
    }
    if v.value(1.0).abs() > 1e-10 {
        return Err(Error::InvalidProfile("ball profile must vanish at t = 1".into()));
    }
    let vv = v.clone();
    let vd = v.clone();
    let breaks = v
        .breakpoints
        .iter()
        .filter(|&&t| t > 0.0 && t < 1.0)
        .filter_map(|&t| ctx.green_ball(t).ok())
        .collect();
    let profile = RadialProfile::from_parts(
        Arc::new(move |s: f64| {
            if s < 0.0 {
                return 0.0;
            }
            match ctx.green_ball_inv(s) {
                Ok(t) => vv.value(t),
                Err(_) => 0.0,
            }
        }),
        Arc::new(move |s: f64| {
            let Ok(t) = ctx.green_ball_inv(s) else { return 0.0 };
            let gp = -ctx.omega().powf(-1.0 / (ctx.p - 1.0)) * t.powf(-ctx.kappa() - 1.0);
            vd.derivative(t) / gp
        }),
        f64::INFINITY,
        breaks,
    );
    SymmetricFunction::new(ctx, profile)
}

/// Generalized harmonic transplantation of a radial whole-space profile:
/// `u(x,y) = w(r)` where `U_p(x,y) = G_rn(r)`; requires `p < n`.
pub fn transplant_from_rn(ctx: PotentialContext, w: &RadialProfile) -> Result<SymmetricFunction> {
    if ctx.is_critical() {
        return Err(Error::Domain("whole-space transplantation needs p < n".into()));
    }
    let ww = w.clone();
    let wd = w.clone();
    let breaks = w
        .breakpoints
        .iter()
        .filter(|&&r| r > 0.0)
        .filter_map(|&r| ctx.green_rn(r).ok())
        .collect();
    let profile = RadialProfile::from_parts(
        Arc::new(move |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            match ctx.green_rn_inv(s) {
                Ok(r) => ww.value(r),
                Err(_) => 0.0,
            }
        }),
        Arc::new(move |s: f64| {
            let Ok(r) = ctx.green_rn_inv(s) else { return 0.0 };
            let gp = -ctx.omega().powf(-1.0 / (ctx.p - 1.0)) * r.powf(-ctx.kappa() - 1.0);
            wd.derivative(r) / gp
        }),
        f64::INFINITY,
        breaks,
    );
    SymmetricFunction::new(ctx, profile)
}

/// Classical transplantation between balls by Green-level matching; at
/// `p = n` this is exactly the scaling `u(z) = v(z/R)`.
pub fn classical_transplant_ball_to_ball(
    params: &Params,
    big_r: f64,
    v: &RadialProfile,
) -> Result<RadialProfile> {
    params.validate()?;
    if !(big_r > 0.0) {
        return Err(Error::Domain("target radius must be positive".into()));
    }
    if v.value(1.0).abs() > 1e-10 {
        return Err(Error::InvalidProfile("ball profile must vanish at t = 1".into()));
    }
    let nf = params.nf();
    let p = params.p;
    let vv = v.clone();
    let vd = v.clone();
    if params.is_critical() {
        let breaks = v.breakpoints.iter().map(|t| t * big_r).collect();
        return RadialProfile::new(
            move |rho| vv.value(rho / big_r),
            move |rho| vd.derivative(rho / big_r) / big_r,
            big_r,
            breaks,
        );
    }
    let kappa = (nf - p) / (p - 1.0);
    // level matching: t^{-kappa} - 1 = rho^{-kappa} - R^{-kappa}
    let fwd = move |rho: f64| (rho.powf(-kappa) - big_r.powf(-kappa) + 1.0).powf(-1.0 / kappa);
    let inv = move |t: f64| (t.powf(-kappa) + big_r.powf(-kappa) - 1.0).powf(-1.0 / kappa);
    let breaks = v
        .breakpoints
        .iter()
        .filter(|&&t| t > 0.0 && t < 1.0)
        .map(|&t| inv(t))
        .collect();
    RadialProfile::new(
        move |rho| {
            if rho <= 0.0 {
                vv.value(0.0)
            } else {
                vv.value(fwd(rho))
            }
        },
        move |rho| {
            if rho <= 0.0 {
                return 0.0;
            }
            let t = fwd(rho);
            vd.derivative(t) * t.powf(kappa + 1.0) * rho.powf(-kappa - 1.0)
        },
        big_r,
        breaks,
    )
}

/// Moser transform at `p = n`: `v(t) = u(r)`, `t = omega^{-1/(n-1)} log(R/r)`.
pub fn moser_transform(n: u32, big_r: f64, u: &RadialProfile) -> Result<RadialProfile> {
    if n < 2 || !(big_r > 0.0) {
        return Err(Error::Domain("moser_transform needs n >= 2, R > 0".into()));
    }
    if u.value(big_r).abs() > 1e-10 {
        return Err(Error::InvalidProfile("profile must vanish at the ball boundary".into()));
    }
    let om = sphere_area(n)?.powf(1.0 / (n as f64 - 1.0));
    let uu = u.clone();
    let ud = u.clone();
    let r_of_t = move |t: f64| big_r * (-om * t).exp();
    let breaks = u
        .breakpoints
        .iter()
        .filter(|&&r| r > 0.0 && r < big_r)
        .map(|&r| (big_r / r).ln() / om)
        .collect();
    Ok(RadialProfile::from_parts(
        Arc::new(move |t: f64| if t < 0.0 { 0.0 } else { uu.value(r_of_t(t)) }),
        Arc::new(move |t: f64| {
            if t < 0.0 {
                return 0.0;
            }
            let r = r_of_t(t);
            ud.derivative(r) * (-om * r)
        }),
        f64::INFINITY,
        breaks,
    ))
}

/// Inverse Moser transform: `u(r) = v(omega^{-1/(n-1)} log(R/r))`.
pub fn moser_inverse(n: u32, big_r: f64, v: &RadialProfile) -> Result<RadialProfile> {
    if n < 2 || !(big_r > 0.0) {
        return Err(Error::Domain("moser_inverse needs n >= 2, R > 0".into()));
    }
    let om_inv = sphere_area(n)?.powf(-1.0 / (n as f64 - 1.0));
    let vv = v.clone();
    let vd = v.clone();
    let om = 1.0 / om_inv;
    let breaks = v
        .breakpoints
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|&t| big_r * (-om * t).exp())
        .collect();
    RadialProfile::new(
        move |r: f64| {
            if r <= 0.0 || r > big_r {
                return 0.0;
            }
            vv.value(om_inv * (big_r / r).ln())
        },
        move |r: f64| {
            if r <= 0.0 || r > big_r {
                return 0.0;
            }
            vd.derivative(om_inv * (big_r / r).ln()) * (-om_inv / r)
        },
        big_r,
        breaks,
    )
}

/// Subcritical Moser variant: `v(t) = u(r)`,
/// `t = C(n,p)(r^{-kappa} - R^{-kappa})`, preserving
/// `|nabla u|_{L^p(B_R)} = |v'|_{L^p(R_+)}`.
pub fn moser_transform_subcritical(
    params: &Params,
    big_r: f64,
    u: &RadialProfile,
) -> Result<RadialProfile> {
    params.validate()?;
    if params.is_critical() {
        return Err(Error::Domain("subcritical variant needs p < n".into()));
    }
    if u.value(big_r).abs() > 1e-10 {
        return Err(Error::InvalidProfile("profile must vanish at the ball boundary".into()));
    }
    let nf = params.nf();
    let p = params.p;
    let kappa = (nf - p) / (p - 1.0);
    let c = sphere_area(params.n)?.powf(-1.0 / (p - 1.0)) / kappa;
    let uu = u.clone();
    let ud = u.clone();
    let r_of_t = move |t: f64| (t / c + big_r.powf(-kappa)).powf(-1.0 / kappa);
    let breaks = u
        .breakpoints
        .iter()
        .filter(|&&r| r > 0.0 && r < big_r)
        .map(|&r| c * (r.powf(-kappa) - big_r.powf(-kappa)))
        .collect();
    Ok(RadialProfile::from_parts(
        Arc::new(move |t: f64| if t < 0.0 { 0.0 } else { uu.value(r_of_t(t)) }),
        Arc::new(move |t: f64| {
            if t < 0.0 {
                return 0.0;
            }
            let r = r_of_t(t);
            // dr/dt = -r^{kappa+1} / (c kappa)
            ud.derivative(r) * (-r.powf(kappa + 1.0) / (c * kappa))
        }),
        f64::INFINITY,
        breaks,
    ))
}

/// Dimension transform: matches the critical Green function on `B_R^n`
/// against the `p = n` Green function on `B_R^m`, `m > n`, preserving the
/// `L^n` gradient norm across dimensions.
pub fn dimension_transform(n: u32, m: u32, big_r: f64, u: &RadialProfile) -> Result<RadialProfile> {
    if m <= n {
        return Err(Error::Domain(format!("target dimension {m} must exceed {n}")));
    }
    if n < 2 || !(big_r > 0.0) {
        return Err(Error::Domain("dimension_transform needs n >= 2, R > 0".into()));
    }
    if u.value(big_r).abs() > 1e-10 {
        return Err(Error::InvalidProfile("profile must vanish at the ball boundary".into()));
    }
    let nf = n as f64;
    let mf = m as f64;
    let om_n = sphere_area(n)?.powf(1.0 / (nf - 1.0));
    let om_m = sphere_area(m)?.powf(-1.0 / (nf - 1.0));
    let expo = (mf - nf) / (nf - 1.0);
    let coeff = (nf - 1.0) / (mf - nf) * om_m * om_n;
    // log(R/sigma) = coeff (rho^{-expo} - R^{-expo})
    let sigma_of_rho =
        move |rho: f64| big_r * (-coeff * (rho.powf(-expo) - big_r.powf(-expo))).exp();
    let uu = u.clone();
    let ud = u.clone();
    let rho_of_sigma =
        move |sigma: f64| ((big_r / sigma).ln() / coeff + big_r.powf(-expo)).powf(-1.0 / expo);
    let breaks = u
        .breakpoints
        .iter()
        .filter(|&&s| s > 0.0 && s < big_r)
        .map(|&s| rho_of_sigma(s))
        .collect();
    RadialProfile::new(
        move |rho: f64| {
            if rho <= 0.0 {
                return uu.value(0.0);
            }
            uu.value(sigma_of_rho(rho))
        },
        move |rho: f64| {
            if rho <= 0.0 {
                return 0.0;
            }
            let sigma = sigma_of_rho(rho);
            // dsigma/drho = sigma coeff expo rho^{-expo-1}
            ud.derivative(sigma) * sigma * coeff * expo * rho.powf(-expo - 1.0)
        },
        big_r,
        breaks,
    )
}

/// Weighted-to-unweighted transform: `u(tau) = w(rho)` with
/// `omega^{-1/(p-1)} log(1/tau) = C(n,p) rho^{-kappa}`; a pure change of
/// variables from radial profiles on the whole space to the unit ball.
pub fn weighted_transform(params: &Params, w: &RadialProfile) -> Result<RadialProfile> {
    params.validate()?;
    if params.is_critical() {
        return Err(Error::Domain("weighted transform needs p < n".into()));
    }
    let nf = params.nf();
    let p = params.p;
    let kappa = (nf - p) / (p - 1.0);
    let c = (p - 1.0) / (nf - p); // log(1/tau) = c rho^{-kappa}
    let rho_of_tau = move |tau: f64| (c / (1.0 / tau).ln()).powf(1.0 / kappa);
    let ww = w.clone();
    let wd = w.clone();
    let breaks = w
        .breakpoints
        .iter()
        .filter(|&&r| r > 0.0)
        .map(|&r| (-c * r.powf(-kappa)).exp())
        .collect();
    RadialProfile::new(
        move |tau: f64| {
            if tau <= 0.0 {
                return 0.0;
            }
            if tau >= 1.0 {
                return ww.value(f64::INFINITY);
            }
            ww.value(rho_of_tau(tau))
        },
        move |tau: f64| {
            if tau <= 0.0 || tau >= 1.0 {
                return 0.0;
            }
            let rho = rho_of_tau(tau);
            // drho/dtau = rho / (kappa tau log(1/tau))
            wd.derivative(rho) * rho / (kappa * tau * (1.0 / tau).ln())
        },
        1.0,
        breaks,
    )
}

/// Precomputed `F_p` on a log-spaced level grid, interpolated by a
/// monotone cubic in log-log coordinates (where the level dependence is
/// close to a power law); clamped below the grid, power-extrapolated above
/// it with the analytic decay `F_p(s) ~ s^{-(n+p-2)/(n-p)}`.
#[derive(Debug, Clone)]
pub struct FpTable {
    log_s: Vec<f64>,
    log_abs: Vec<f64>,
    slopes: Vec<f64>,
    sign: f64,
    decay: f64,
    zero: bool,
}

impl FpTable {
    pub fn build(
        ctx: &PotentialContext,
        s_lo: f64,
        s_hi: f64,
        len: usize,
        exec: Exec,
        spec: &QuadSpec,
    ) -> Result<Self> {
        if !(s_lo > 0.0 && s_hi > s_lo) || len < 8 {
            return Err(Error::Domain("invalid F_p grid".into()));
        }
        if ctx.p == 2.0 || ctx.is_critical() {
            return Ok(FpTable {
                log_s: vec![s_lo.ln(), s_hi.ln()],
                log_abs: vec![0.0, 0.0],
                slopes: vec![0.0, 0.0],
                sign: 0.0,
                decay: 1.0,
                zero: true,
            });
        }
        let levels: Vec<f64> = (0..len)
            .map(|i| {
                let t = i as f64 / (len - 1) as f64;
                (s_lo.ln() + t * (s_hi.ln() - s_lo.ln())).exp()
            })
            .collect();
        let results = run_grid(exec, &levels, |&s| superlevel_integral(ctx, s, spec));
        let mut f = Vec::with_capacity(len);
        for r in results {
            let r = r?;
            if !r.converged {
                return Err(Error::Unconverged {
                    value: r.value,
                    error_estimate: r.error_estimate,
                });
            }
            f.push(r.value);
        }
        let log_s: Vec<f64> = levels.iter().map(|s| s.ln()).collect();
        let sign = if ctx.p > 2.0 { -1.0 } else { 1.0 };
        let log_abs: Vec<f64> = f.iter().map(|v| v.abs().max(1e-300).ln()).collect();
        let slopes = monotone_slopes(&log_s, &log_abs);
        let nf = ctx.nf();
        Ok(FpTable {
            log_s,
            log_abs,
            slopes,
            sign,
            decay: (nf + ctx.p - 2.0) / (nf - ctx.p),
        zero: false,
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        if self.zero {
            return 0.0;
        }
        let x = s.ln();
        let n = self.log_s.len();
        if x <= self.log_s[0] {
            return self.sign * self.log_abs[0].exp();
        }
        if x >= self.log_s[n - 1] {
            // analytic power decay toward zero
            return self.sign
                * (self.log_abs[n - 1] - self.decay * (x - self.log_s[n - 1])).exp();
        }
        let k = match self.log_s.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.sign * self.log_abs[i].exp(),
            Err(i) => i - 1,
        };
        let h = self.log_s[k + 1] - self.log_s[k];
        let t = (x - self.log_s[k]) / h;
        let (y0, y1) = (self.log_abs[k], self.log_abs[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let interp = y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2);
        self.sign * interp.exp()
    }
}

/// Fritsch-Carlson monotone cubic slopes.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let d: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        m[i] = if d[i - 1] * d[i] > 0.0 {
            0.5 * (d[i - 1] + d[i])
        } else {
            0.0
        };
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        } else {
            let a = m[i] / d[i];
            let b = m[i + 1] / d[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[i] = tau * a * d[i];
                m[i + 1] = tau * b * d[i];
            }
        }
    }
    m
}

/// Both routes to a half-space integral of a symmetric function.
#[derive(Debug, Clone)]
pub struct EnergyPair {
    /// direct axisymmetric quadrature over the half-space
    pub direct: IntegralResult,
    /// base-domain integral plus the `F_p` correction term
    pub via_identity: IntegralResult,
}

/// One-dimensional level-space integral
/// `int_0^inf g(profile, s) ds` over the support of the level profile.
fn level_integral(
    profile: &RadialProfile,
    g: impl Fn(f64) -> f64,
    spec: &QuadSpec,
) -> Result<IntegralResult> {
    let cut = profile
        .breakpoints()
        .iter()
        .copied()
        .chain(std::iter::once(profile.support_end()))
        .filter(|t| t.is_finite() && *t > 0.0)
        .fold(1.0f64, f64::max);
    let mut head = integrate_1d_with_breaks(
        &g,
        0.0,
        cut,
        profile.breakpoints(),
        (Endpoint::Singular, Endpoint::Regular),
        spec,
    )?;
    if !profile.support_end().is_finite() {
        let tail = integrate_1d_to_inf(&g, cut, spec)?;
        head.merge(&tail);
    }
    Ok(head)
}

/// Dirichlet energy of a symmetric function computed both directly and via
/// the base-domain route `int_B |v'|^p + omega int t^{n-1} |v'|^p F_p(G(t)) dt`.
///
/// The identity route is evaluated in level space, where the radial change
/// of variables is exact: `omega int_0^1 t^{n-1} |v'|^p dt = int_0^inf
/// |u'(s)|^p ds` and the correction becomes `int_0^inf |u'(s)|^p F_p(s) ds`
/// (the exponent `n - 1 - (kappa+1)(p-1)` vanishes identically).
pub fn dirichlet_energy_symmetric(
    u: &SymmetricFunction,
    fp: Option<&FpTable>,
    spec: &QuadSpec,
) -> Result<EnergyPair> {
    let ctx = *u.ctx();
    let direct = integrate_halfspace_axisym(
        ctx.n,
        |r, y| {
            let pt = HalfSpacePoint { r, y };
            match u.grad(&pt) {
                Ok((gr, gy)) => gr.hypot(gy).powf(ctx.p),
                Err(_) => 0.0,
            }
        },
        None,
        None,
        Some(0.25),
        spec,
    )?;

    let prof = u.profile();
    let mut via = level_integral(prof, |s| prof.derivative(s).abs().powf(ctx.p), spec)?;
    if !(ctx.p == 2.0 || ctx.is_critical()) {
        let table = fp.ok_or_else(|| {
            Error::Domain("F_p table required for the identity route when 2 < p < n".into())
        })?;
        let corr = level_integral(
            prof,
            |s| prof.derivative(s).abs().powf(ctx.p) * table.eval(s),
            spec,
        )?;
        via.merge(&corr);
    }
    Ok(EnergyPair {
        direct,
        via_identity: via,
    })
}

/// The improved-Hardy weighted integral of a symmetric function computed
/// both directly (`int V_p^{p/2} d_-^{-p} |u|^p`) and via the whole-space
/// identity `int |w|^p/|z|^p + omega int |w|^p r^{n-1-p} F_p(G_rn(r)) dr`.
pub fn hardy_side_symmetric(
    u: &SymmetricFunction,
    fp: Option<&FpTable>,
    spec: &QuadSpec,
) -> Result<EnergyPair> {
    let ctx = *u.ctx();
    if ctx.is_critical() {
        return Err(Error::Domain("hardy_side_symmetric needs p < n".into()));
    }
    let p = ctx.p;
    let nf = ctx.nf();
    let direct = integrate_halfspace_axisym(
        ctx.n,
        |r, y| {
            let pt = HalfSpacePoint { r, y };
            let Ok(val) = u.value(&pt) else { return 0.0 };
            if val == 0.0 {
                return 0.0;
            }
            let vp = ctx.v_p(&pt).unwrap_or(f64::NAN);
            val.abs().powf(p) * vp.powf(p / 2.0) * pt.d_minus_sq().powf(-p / 2.0)
        },
        Some(PoleModel::Power { beta: p }),
        None,
        Some(0.25),
        spec,
    )?;

    // level-space form of the whole-space route: with r = (C/s)^{1/kappa},
    // `omega int |w|^p r^{n-1-p} dr = omega C^{p-1}/kappa int |u(s)|^p s^{-p} ds`
    let prof = u.profile();
    let omega = ctx.omega();
    let _ = nf;
    let coeff = omega * ctx.c_np()?.powf(p - 1.0) / ctx.kappa();
    let mut via = level_integral(prof, |s| prof.value(s).abs().powf(p) * s.powf(-p), spec)?;
    via.value *= coeff;
    via.error_estimate *= coeff;
    if p != 2.0 {
        let table = fp.ok_or_else(|| {
            Error::Domain("F_p table required for the identity route when 2 < p < n".into())
        })?;
        let mut corr = level_integral(
            prof,
            |s| prof.value(s).abs().powf(p) * s.powf(-p) * table.eval(s),
            spec,
        )?;
        corr.value *= coeff;
        corr.error_estimate *= coeff;
        via.merge(&corr);
    }
    Ok(EnergyPair {
        direct,
        via_identity: via,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::cayley;
    use crate::testing::assert_rel;
    use nalgebra::DVector;

    fn smooth_ball_profile() -> RadialProfile {
        // v(t) = (1 - t^2)^2
        RadialProfile::new(
            |t| (1.0 - t * t).powi(2),
            |t| -4.0 * t * (1.0 - t * t),
            1.0,
            vec![],
        )
        .unwrap()
    }

    fn gaussian_rn_profile() -> RadialProfile {
        RadialProfile::from_parts(
            Arc::new(|r: f64| (-r * r).exp()),
            Arc::new(|r: f64| -2.0 * r * (-r * r).exp()),
            f64::INFINITY,
            vec![],
        )
    }

    #[test]
    fn profile_validation() {
        assert!(RadialProfile::new(|t| 1.0 - t, |_| -1.0, 1.0, vec![]).is_ok());
        assert!(RadialProfile::new(|_| 1.0, |_| 0.0, 1.0, vec![]).is_err());
        let zero = RadialProfile::zero();
        assert_eq!(zero.value(0.3), 0.0);
    }

    #[test]
    fn ball_transplant_critical_matches_exponential_form() {
        // p = n: u(s) = v(exp(-omega^{1/(n-1)} s)) so v = 1 - t gives
        // 1 - exp(-omega^{1/(n-1)} s)
        let ctx = PotentialContext::new(3, 3.0).unwrap();
        let v = RadialProfile::new(|t| 1.0 - t, |_| -1.0, 1.0, vec![]).unwrap();
        let u = transplant_from_ball(ctx, &v).unwrap();
        let om = sphere_area(3).unwrap().powf(0.5);
        for s in [0.0, 0.1, 0.7, 3.0] {
            assert_rel(u.profile().value(s) + 1e-300, 1.0 - (-om * s).exp() + 1e-300, 1e-12);
        }
        // zero profile transplants to zero
        let z = transplant_from_ball(ctx, &RadialProfile::zero()).unwrap();
        assert_eq!(z.value(&HalfSpacePoint { r: 0.4, y: 0.8 }).unwrap(), 0.0);
    }

    #[test]
    fn ball_transplant_critical_is_cayley_pullback() {
        for n in [2u32, 3] {
            let ctx = PotentialContext::new(n, n as f64).unwrap();
            let v = smooth_ball_profile();
            let u = transplant_from_ball(ctx, &v).unwrap();
            let pts = [(0.3, 0.5), (1.2, 2.0), (0.01, 1.5), (2.5, 0.2)];
            for (r, y) in pts {
                let mut z = DVector::zeros(n as usize);
                z[0] = r;
                z[n as usize - 1] = y;
                let b = cayley(&z).unwrap();
                let want = v.value(b.norm());
                let got = u.value(&HalfSpacePoint { r, y }).unwrap();
                assert!(
                    (got - want).abs() <= 1e-10 * (1.0 + want.abs()),
                    "n={n} at ({r},{y}): {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn rn_transplant_is_h_composition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let ctx = PotentialContext::new(5, 3.0).unwrap();
        let w = gaussian_rn_profile();
        let u = transplant_from_rn(ctx, &w).unwrap();
        for _ in 0..1000 {
            let pt = HalfSpacePoint {
                r: rng.gen_range(0.0..3.0),
                y: rng.gen_range(1e-3..3.0),
            };
            if pt.d_minus() < 1e-8 {
                continue;
            }
            let h = ctx.h_map(&pt).unwrap();
            assert_rel(u.value(&pt).unwrap() + 1.0, w.value(h) + 1.0, 1e-12);
        }
        // critical case is rejected
        let crit = PotentialContext::new(3, 3.0).unwrap();
        assert!(transplant_from_rn(crit, &w).is_err());
        // compactly supported w concentrates near the pole
        let wc = RadialProfile::new(
            |r| if r < 1.0 { (1.0 - r * r).powi(2) } else { 0.0 },
            |r| if r < 1.0 { -4.0 * r * (1.0 - r * r) } else { 0.0 },
            1.0,
            vec![],
        )
        .unwrap();
        let uc = transplant_from_rn(ctx, &wc).unwrap();
        let far = HalfSpacePoint { r: 2.0, y: 0.5 };
        assert_eq!(uc.value(&far).unwrap(), 0.0);
        let near = HalfSpacePoint { r: 0.05, y: 1.02 };
        assert!(uc.value(&near).unwrap() > 0.0);
    }

    #[test]
    fn ball_to_ball_spot_values() {
        // p = n: pure scaling
        let params = Params::new(3, 3.0).unwrap();
        let v = smooth_ball_profile();
        let u = classical_transplant_ball_to_ball(&params, 2.0, &v).unwrap();
        assert_rel(u.value(1.0), v.value(0.5), 1e-14);

        // R = 1 is the identity
        let params = Params::new(3, 2.0).unwrap();
        let u = classical_transplant_ball_to_ball(&params, 1.0, &v).unwrap();
        for t in [0.2, 0.5, 0.9] {
            assert_rel(u.value(t), v.value(t), 1e-13);
        }

        // n=3, p=2, R=2: level matching 1/t - 1 = 1/rho - 1/2
        let u = classical_transplant_ball_to_ball(&params, 2.0, &v).unwrap();
        assert_rel(u.value(1.0), v.value(2.0 / 3.0), 1e-13);
    }

    #[test]
    fn moser_examples_and_roundtrip() {
        // n=2, R=1, u = 1-r: v(t) = 1 - exp(-2 pi t)
        let u = RadialProfile::new(|r| 1.0 - r, |_| -1.0, 1.0, vec![]).unwrap();
        let v = moser_transform(2, 1.0, &u).unwrap();
        for t in [0.0, 0.05, 0.3] {
            assert_rel(
                v.value(t) + 1.0,
                2.0 - (-2.0 * std::f64::consts::PI * t).exp(),
                1e-13,
            );
        }
        let back = moser_inverse(2, 1.0, &v).unwrap();
        for r in [0.1, 0.4, 0.9] {
            assert_rel(back.value(r), u.value(r), 1e-12);
            assert_rel(back.derivative(r), u.derivative(r), 1e-10);
        }
        // zero maps to zero
        let z = moser_transform(3, 1.0, &RadialProfile::zero()).unwrap();
        assert_eq!(z.value(0.7), 0.0);
    }

    #[test]
    fn moser_isometry() {
        let spec = QuadSpec::default();
        for (n, big_r) in [(2u32, 1.0), (3, 2.5)] {
            let u = RadialProfile::new(
                move |r| (1.0 - (r / big_r).powi(2)).powi(2),
                move |r| -4.0 * r / (big_r * big_r) * (1.0 - (r / big_r).powi(2)),
                big_r,
                vec![],
            )
            .unwrap();
            let v = moser_transform(n, big_r, &u).unwrap();
            let lhs = profile_energy_radial(n, n as f64, &u, &spec).unwrap();
            let rhs = profile_energy_line(n as f64, &v, &spec).unwrap();
            assert!(lhs.converged && rhs.converged);
            assert_rel(lhs.value, rhs.value, 1e-6);
        }
        // subcritical variant
        let params = Params::new(4, 2.5).unwrap();
        let big_r = 1.5;
        let u = RadialProfile::new(
            move |r| (1.0 - (r / big_r).powi(2)).powi(2),
            move |r| -4.0 * r / (big_r * big_r) * (1.0 - (r / big_r).powi(2)),
            big_r,
            vec![],
        )
        .unwrap();
        let v = moser_transform_subcritical(&params, big_r, &u).unwrap();
        let lhs = profile_energy_radial(4, 2.5, &u, &spec).unwrap();
        let rhs = profile_energy_line(2.5, &v, &spec).unwrap();
        assert_rel(lhs.value, rhs.value, 1e-6);
    }

    #[test]
    fn dimension_transform_isometry() {
        let spec = QuadSpec::default();
        let (n, m, big_r) = (2u32, 3u32, 1.0);
        let u = RadialProfile::new(
            |r| (1.0 - r * r).powi(2),
            |r| -4.0 * r * (1.0 - r * r),
            big_r,
            vec![],
        )
        .unwrap();
        let v = dimension_transform(n, m, big_r, &u).unwrap();
        // boundary is fixed
        assert!(v.value(big_r).abs() < 1e-12);
        // hand matching: log(1/sigma) = (1/rho - 1)/2 at n=2, m=3, R=1
        for rho in [0.3, 0.6, 0.9] {
            let sigma = (-(1.0f64 / rho - 1.0) / 2.0).exp();
            assert_rel(v.value(rho), u.value(sigma), 1e-12);
        }
        // the L^n gradient norms agree across dimensions
        let lhs = profile_energy_radial(n, n as f64, &u, &spec).unwrap();
        let rhs = profile_energy_radial(m, n as f64, &v, &spec).unwrap();
        assert_rel(lhs.value, rhs.value, 1e-4);
        assert!(dimension_transform(3, 3, 1.0, &u).is_err());
    }

    #[test]
    fn weighted_transform_limits_and_identity() {
        let params = Params::new(3, 2.0).unwrap();
        let w = gaussian_rn_profile();
        let u = weighted_transform(&params, &w).unwrap();
        // |y| -> 1 corresponds to rho -> infinity (w -> 0)
        assert!(u.value(1.0 - 1e-9).abs() < 1e-6);
        // |y| -> 0 corresponds to rho -> 0
        assert_rel(u.value(1e-12) + 1.0, w.value(0.0) + 1.0, 1e-3);
        // hand spot: log(1/tau) = c rho^{-kappa}, c = 1, kappa = 1 at (3,2)
        let tau = (-1.0f64 / 0.7).exp();
        assert_rel(u.value(tau), w.value(0.7), 1e-12);

        // 1-D reduction of the weighted norm identity:
        // omega int_0^1 |u'|^p tau^{p-1} dtau = omega int_0^inf |w'|^p rho^{n-1} drho
        let spec = QuadSpec::default();
        let p = params.p;
        let lhs = integrate_1d_with_breaks(
            |tau: f64| u.derivative(tau).abs().powf(p) * tau.powf(p - 1.0),
            0.0,
            1.0,
            u.breakpoints(),
            (Endpoint::Singular, Endpoint::Regular),
            &spec,
        )
        .unwrap();
        let rhs = {
            let g = |rho: f64| w.derivative(rho).abs().powf(p);
            crate::quadrature::integrate_radial_rn(3, g, &[], &spec).unwrap()
        };
        assert_rel(
            lhs.value * sphere_area(3).unwrap(),
            rhs.value,
            1e-7,
        );
    }

    #[test]
    fn level_set_identity_for_green_rn() {
        // int_{[G < t]} |grad G|^p = t for the whole-space Green function
        let spec = QuadSpec::default();
        for (n, p) in [(3u32, 2.0), (5, 3.0)] {
            let ctx = PotentialContext::new(n, p).unwrap();
            for t in [0.1, 1.0, 10.0] {
                let r_t = ctx.green_rn_inv(t).unwrap();
                let om_pow = ctx.omega().powf(-1.0 / (p - 1.0));
                let kappa = ctx.kappa();
                // substitute u = 1/r: finite integral over (0, 1/r_t]
                // with the exponents combined analytically
                let expo = (kappa + 1.0) * p - n as f64 - 1.0;
                let integrand = move |u: f64| om_pow.powf(p) * u.powf(expo);
                let res = crate::quadrature::integrate_1d_singular(
                    integrand,
                    0.0,
                    1.0 / r_t,
                    (Endpoint::Singular, Endpoint::Regular),
                    &spec,
                )
                .unwrap();
                assert!(res.converged);
                assert_rel(res.value * ctx.omega(), t, 1e-6);
            }
        }
    }

    #[test]
    fn fp_table_matches_direct_evaluation() {
        let ctx = PotentialContext::new(5, 3.0).unwrap();
        let spec = QuadSpec::default().with_rel_tol(1e-6);
        let table = FpTable::build(&ctx, 1e-3, 1e3, 33, Exec::Sequential, &spec).unwrap();
        for s in [0.02, 0.7, 4.0, 111.0] {
            let direct = superlevel_integral(&ctx, s, &spec).unwrap();
            let interp = table.eval(s);
            assert!(
                (interp - direct.value).abs() <= 2e-3 * direct.value.abs().max(1e-6),
                "s={s}: table {interp} vs direct {}",
                direct.value
            );
        }
        // analytic decay of the extrapolation: F(2s)/F(s) -> 2^{-(n+p-2)/(n-p)}
        let s_big = 5e3;
        let ratio = table.eval(2.0 * s_big) / table.eval(s_big);
        assert_rel(ratio, 2f64.powf(-(5.0 + 3.0 - 2.0) / (5.0 - 3.0)), 1e-6);
        // the zero cases collapse to the zero table
        let ctx2 = PotentialContext::new(4, 2.0).unwrap();
        let t2 = FpTable::build(&ctx2, 1e-3, 1e3, 9, Exec::Sequential, &spec).unwrap();
        assert_eq!(t2.eval(0.5), 0.0);
    }

    #[test]
    fn fp_extrapolation_matches_true_decay() {
        // the power law used above the grid is checked against the direct
        // superlevel integral at large levels
        let ctx = PotentialContext::new(5, 3.0).unwrap();
        let spec = QuadSpec::default().with_rel_tol(1e-7);
        let f1 = superlevel_integral(&ctx, 50.0, &spec).unwrap().value;
        let f2 = superlevel_integral(&ctx, 100.0, &spec).unwrap().value;
        let decay = (5.0 + 3.0 - 2.0) / (5.0 - 3.0);
        assert_rel(f1 / f2, 2f64.powf(decay), 2e-2);
    }
}
