//! Shared parameter records.

use crate::{Error, Result};

/// Dimension and exponent bundle used throughout the crate.
///
/// `n` is the space dimension, `p` the Sobolev exponent with `1 < p <= n`.
/// `s` (Hardy-Sobolev weight power) and `q` (Bliss exponent) are optional
/// extras used by the inequality functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub n: u32,
    pub p: f64,
    pub s: Option<f64>,
    pub q: Option<f64>,
}

impl Params {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        let params = Params {
            n,
            p,
            s: None,
            q: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_s(mut self, s: f64) -> Result<Self> {
        self.s = Some(s);
        self.validate()?;
        Ok(self)
    }

    pub fn with_q(mut self, q: f64) -> Result<Self> {
        self.q = Some(q);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!("dimension n = {} < 2", self.n)));
        }
        let nf = self.n as f64;
        if !(self.p > 1.0 && self.p <= nf) {
            return Err(Error::Domain(format!(
                "exponent p = {} outside (1, {}]",
                self.p, self.n
            )));
        }
        if let Some(s) = self.s {
            if !(0.0..self.p).contains(&s) {
                return Err(Error::Domain(format!("weight power s = {s} outside [0, p)")));
            }
        }
        if let Some(q) = self.q {
            if q <= self.p {
                return Err(Error::Domain(format!("Bliss exponent q = {q} <= p")));
            }
        }
        Ok(())
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `true` when `p` sits at the conformal exponent `p = n`.
    pub fn is_critical(&self) -> bool {
        self.p == self.nf()
    }

    /// Critical Sobolev exponent `p* = np/(n-p)`; requires `p < n`.
    pub fn p_star(&self) -> Result<f64> {
        if self.is_critical() {
            return Err(Error::Domain("p* undefined at p = n".into()));
        }
        Ok(self.nf() * self.p / (self.nf() - self.p))
    }

    /// Hardy-Sobolev exponent `p*(s) = p(n-s)/(n-p)`; requires `p < n`.
    pub fn p_star_s(&self, s: f64) -> Result<f64> {
        if self.is_critical() {
            return Err(Error::Domain("p*(s) undefined at p = n".into()));
        }
        Ok(self.p * (self.nf() - s) / (self.nf() - self.p))
    }
}
