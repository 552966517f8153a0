//! The reflected fundamental solution of the p-Laplacian on the half-space,
//! its gradient and p-Laplacian, the improved Hardy potentials built from
//! it, and the explicit Green functions on balls and on the whole space.
//!
//! Everything is axisymmetric: a point of the half-space is stored as
//! `(r, y)` with `r = |x|` the distance to the symmetry axis and `y > 0`
//! the height.  The pole sits at `(0, 1)`.

use crate::params::Params;
use crate::special::sphere_area;
use crate::{Error, Result};

/// Point of the open half-space in axisymmetric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpacePoint {
    pub r: f64,
    pub y: f64,
}

impl HalfSpacePoint {
    pub fn new(r: f64, y: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius r = {r} must be >= 0")));
        }
        if !(y > 0.0) {
            return Err(Error::Domain(format!("height y = {y} must be > 0")));
        }
        Ok(HalfSpacePoint { r, y })
    }

    /// Squared distance to the pole `(0, 1)`.
    pub fn d_minus_sq(&self) -> f64 {
        self.r * self.r + (1.0 - self.y) * (1.0 - self.y)
    }

    /// Squared distance to the reflected pole `(0, -1)`.
    pub fn d_plus_sq(&self) -> f64 {
        self.r * self.r + (1.0 + self.y) * (1.0 + self.y)
    }

    pub fn d_minus(&self) -> f64 {
        self.d_minus_sq().sqrt()
    }

    pub fn d_plus(&self) -> f64 {
        self.d_plus_sq().sqrt()
    }

    /// `ln(d_minus^2 / d_plus^2)`, evaluated without cancellation on both
    /// ends: near the boundary (`X -> 1`) through `ln1p(-4y/d_+^2)`, near
    /// the pole (`X -> 0`) through the plain log quotient.
    pub fn ln_x(&self) -> f64 {
        let a = self.d_minus_sq();
        let b = self.d_plus_sq();
        if a <= 0.25 * b {
            a.ln() - b.ln()
        } else {
            (-4.0 * self.y / b).ln_1p()
        }
    }
}

/// Ratio `X = d_minus^2 / d_plus^2 in [0, 1)`.
pub fn x_ratio(pt: &HalfSpacePoint) -> Result<f64> {
    if !(pt.y > 0.0) {
        return Err(Error::Domain("x_ratio requires y > 0".into()));
    }
    Ok(pt.d_minus_sq() / pt.d_plus_sq())
}

/// The potential `V_N` of the critical Hardy weight; the weight itself is
/// `V_N^{N/2}`.
pub fn v_n_weight(n: u32, pt: &HalfSpacePoint) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("v_n_weight requires n >= 2".into()));
    }
    if !(pt.y > 0.0) {
        return Err(Error::Domain("v_n_weight requires y > 0".into()));
    }
    let a = pt.d_minus_sq();
    if a == 0.0 {
        return Err(Error::Pole);
    }
    let b = pt.d_plus_sq();
    let ln_x = pt.ln_x();
    // V_N = [ d_-^2 (d_+^2/4) (log sqrt(d_+^2/d_-^2))^2 ]^{-1}
    Ok(16.0 / (a * b * ln_x * ln_x))
}

/// `psi_2 = d_+^{-(n-2)}` and the explicit half-space Green function for
/// `p = 2`, `G = (1/(n-2)) omega^{-1} [d_-^{-(n-2)} - psi_2]`.
pub fn psi2_g2(n: u32, pt: &HalfSpacePoint) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::Domain("psi2_g2 requires n >= 3 (exponent degenerates at n = 2)".into()));
    }
    let a = pt.d_minus_sq();
    if a == 0.0 {
        return Err(Error::Pole);
    }
    if !(pt.y > 0.0) {
        return Err(Error::Domain("psi2_g2 requires y > 0".into()));
    }
    let nf = n as f64;
    let b = pt.d_plus_sq();
    let omega = sphere_area(n)?;
    let psi2 = b.powf(-(nf - 2.0) / 2.0);
    let g = (a.powf(-(nf - 2.0) / 2.0) - psi2) / ((nf - 2.0) * omega);
    Ok((psi2, g))
}

/// Gradient of the reflected fundamental solution in axisymmetric
/// components, plus its magnitude.
#[derive(Debug, Clone, Copy)]
pub struct Gradient {
    pub dr: f64,
    pub dy: f64,
    pub magnitude: f64,
}

/// Dimension/exponent context with the precomputed constants of the
/// fundamental solution.
#[derive(Debug, Clone, Copy)]
pub struct PotentialContext {
    pub n: u32,
    pub p: f64,
    omega: f64,
    /// `omega^{-1/(p-1)}`
    om_pow: f64,
    /// `kappa = (n-p)/(p-1)`, zero in the critical case
    kappa: f64,
}

impl PotentialContext {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        Params::new(n, p)?;
        let nf = n as f64;
        let omega = sphere_area(n)?;
        Ok(PotentialContext {
            n,
            p,
            omega,
            om_pow: omega.powf(-1.0 / (p - 1.0)),
            kappa: (nf - p) / (p - 1.0),
        })
    }

    pub fn params(&self) -> Params {
        Params {
            n: self.n,
            p: self.p,
            s: None,
            q: None,
        }
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn is_critical(&self) -> bool {
        self.p == self.nf()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `kappa = (n-p)/(p-1)`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The coefficient `C(n,p) = ((p-1)/(n-p)) omega^{-1/(p-1)}` of the
    /// subcritical fundamental solution; requires `p < n`.
    pub fn c_np(&self) -> Result<f64> {
        if self.is_critical() {
            return Err(Error::Domain("C(n,p) undefined at p = n".into()));
        }
        Ok(self.om_pow / self.kappa)
    }

    fn check_interior(&self, pt: &HalfSpacePoint) -> Result<(f64, f64)> {
        if !(pt.y > 0.0) {
            return Err(Error::Domain(format!("point below the boundary: y = {}", pt.y)));
        }
        let a = pt.d_minus_sq();
        if a == 0.0 {
            return Err(Error::Pole);
        }
        Ok((a, pt.d_plus_sq()))
    }

    /// The reflected fundamental solution.  Subcritical branch
    /// `C(n,p) [d_-^{-kappa} - d_+^{-kappa}]`, critical branch
    /// `omega^{-1/(n-1)} log(d_+/d_-)`.  Strictly positive on the open
    /// half-space.
    pub fn u(&self, pt: &HalfSpacePoint) -> Result<f64> {
        let (a, _b) = self.check_interior(pt)?;
        let ln_x = pt.ln_x();
        if self.is_critical() {
            return Ok(-0.5 * self.om_pow * ln_x);
        }
        // d_-^{-kappa} - d_+^{-kappa} = a^{-kappa/2} (1 - X^{kappa/2})
        let diff = a.powf(-self.kappa / 2.0) * (-(0.5 * self.kappa * ln_x).exp_m1());
        Ok(self.om_pow / self.kappa * diff)
    }

    /// Analytic gradient of `u` in axisymmetric components.
    pub fn grad_u(&self, pt: &HalfSpacePoint) -> Result<Gradient> {
        let (a, b) = self.check_interior(pt)?;
        let ea = a.powf(-self.kappa / 2.0 - 1.0);
        let eb = b.powf(-self.kappa / 2.0 - 1.0);
        let dr = self.om_pow * pt.r * (eb - ea);
        let dy = self.om_pow * (-(pt.y - 1.0) * ea + (pt.y + 1.0) * eb);
        Ok(Gradient {
            dr,
            dy,
            magnitude: dr.hypot(dy),
        })
    }

    /// `|grad u|^2` straight from the displayed closed form (cross-term
    /// shape); used to cross-check the component form.
    pub fn grad_u_mag_sq_closed(&self, pt: &HalfSpacePoint) -> Result<f64> {
        let (a, b) = self.check_interior(pt)?;
        let om2 = self.om_pow * self.om_pow;
        let cross = a.powf(-self.kappa / 2.0 - 1.0)
            * b.powf(-self.kappa / 2.0 - 1.0)
            * (pt.r * pt.r + pt.y * pt.y - 1.0);
        Ok(om2 * (a.powf(-self.kappa - 1.0) + b.powf(-self.kappa - 1.0) - 2.0 * cross))
    }

    /// Pointwise `-Delta_p u` in closed form: exactly `0` for `p = 2` and
    /// `p = n`, nonpositive for `2 < p < n`, nonnegative for `1 < p < 2`,
    /// and zero on the symmetry axis `r = 0`.
    ///
    /// `-Delta_p u = ((n-p)(p-2)(n+p-2)/(p-1)^2) omega^{-2/(p-1)}
    ///    |grad u|^{p-4} u (d_-^2 d_+^2)^{-kappa/2-1} (-4 r^2)/(d_-^2 d_+^2)`.
    ///
    /// The bracket `(n+p-2)((r^2+y^2-1)^2 - d_-^2 d_+^2)/(d_-^2 d_+^2)`
    /// collapses to `-4 r^2 (n+p-2)/(d_-^2 d_+^2)`; this form is validated
    /// against exact symbolic differentiation and against the
    /// finite-difference divergence oracle in the tests.
    pub fn p_laplacian_u(&self, pt: &HalfSpacePoint) -> Result<f64> {
        let (a, b) = self.check_interior(pt)?;
        if self.p == 2.0 || self.is_critical() {
            return Ok(0.0);
        }
        let nf = self.nf();
        let factor = (nf - self.p) * (self.p - 2.0) * (nf + self.p - 2.0)
            / ((self.p - 1.0) * (self.p - 1.0))
            * self.om_pow.powi(2);
        let grad = self.grad_u(pt)?;
        let uval = self.u(pt)?;
        let ea = a.powf(-self.kappa / 2.0 - 1.0);
        let eb = b.powf(-self.kappa / 2.0 - 1.0);
        Ok(factor * grad.magnitude.powf(self.p - 4.0) * uval * ea * eb * (-4.0 * pt.r * pt.r)
            / (a * b))
    }

    /// Improved Hardy potential `V_p >= 1` (subcritical only).
    pub fn v_p(&self, pt: &HalfSpacePoint) -> Result<f64> {
        if self.is_critical() {
            return Err(Error::Domain("V_p undefined at p = n; use v_n_weight".into()));
        }
        let (_, b) = self.check_interior(pt)?;
        let ln_x = pt.ln_x();
        let e1 = (self.nf() - 1.0) / (self.p - 1.0);
        let sigma = self.kappa / 2.0;
        let cross = pt.r * pt.r + pt.y * pt.y - 1.0;
        let numer = 1.0 + (e1 * ln_x).exp() - 2.0 * (sigma * ln_x).exp() * cross / b;
        let denom = -(sigma * ln_x).exp_m1();
        Ok(numer / (denom * denom))
    }

    /// Green function of the p-Laplacian on the unit ball with pole at the
    /// origin, as a function of the radius `t in (0, 1]`.
    pub fn green_ball(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("green_ball requires t in (0,1], got {t}")));
        }
        if self.is_critical() {
            Ok(self.om_pow * (1.0 / t).ln())
        } else {
            Ok(self.om_pow / self.kappa * (t.powf(-self.kappa) - 1.0))
        }
    }

    /// Exact inverse of [`Self::green_ball`].
    pub fn green_ball_inv(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("green_ball_inv requires s >= 0, got {s}")));
        }
        if self.is_critical() {
            Ok((-s / self.om_pow).exp())
        } else {
            Ok((self.kappa / self.om_pow * s + 1.0).powf(-1.0 / self.kappa))
        }
    }

    /// Green function of the p-Laplacian on the whole space, `p < n`.
    pub fn green_rn(&self, r: f64) -> Result<f64> {
        if self.is_critical() {
            return Err(Error::Domain("green_rn undefined at p = n".into()));
        }
        if !(r > 0.0) {
            return Err(Error::Domain(format!("green_rn requires r > 0, got {r}")));
        }
        Ok(self.om_pow / self.kappa * r.powf(-self.kappa))
    }

    /// Exact inverse of [`Self::green_rn`].
    pub fn green_rn_inv(&self, s: f64) -> Result<f64> {
        if self.is_critical() {
            return Err(Error::Domain("green_rn_inv undefined at p = n".into()));
        }
        if !(s > 0.0) {
            return Err(Error::Domain(format!("green_rn_inv requires s > 0, got {s}")));
        }
        Ok((self.c_np()? / s).powf(1.0 / self.kappa))
    }

    /// Radial coordinate `h` with `u(pt) = green_rn(h)`; `p < n`.
    pub fn h_map(&self, pt: &HalfSpacePoint) -> Result<f64> {
        let uval = self.u(pt)?;
        self.green_rn_inv(uval)
    }
}
