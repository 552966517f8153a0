//! The Möbius transformation group of `R^n` and the Cayley-type involution
//! between the half-space and the unit ball.
//!
//! Maps are stored as ordered compositions of elementary maps (translation,
//! scaling, orthogonal, sphere inversion) and never flattened: inversions
//! are not affine, and chain-rule evaluation of differentials and Jacobians
//! is exact.

use crate::linalg::outer;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

const POLE_EPS: f64 = 1e-300;
const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum ElementaryMap {
    Translation(DVector<f64>),
    Scaling(f64),
    Orthogonal(DMatrix<f64>),
    Inversion,
}

impl ElementaryMap {
    fn check(&self, dim: usize) -> Result<()> {
        match self {
            ElementaryMap::Translation(b) => {
                if b.len() != dim {
                    return Err(Error::Domain("translation vector dimension mismatch".into()));
                }
            }
            ElementaryMap::Scaling(lambda) => {
                if !(*lambda > 0.0) {
                    return Err(Error::Domain(format!("scaling factor {lambda} must be positive")));
                }
            }
            ElementaryMap::Orthogonal(r) => {
                if r.nrows() != dim || r.ncols() != dim {
                    return Err(Error::Domain("orthogonal matrix dimension mismatch".into()));
                }
                let gram = r.transpose() * r;
                let id = DMatrix::<f64>::identity(dim, dim);
                if (gram - id).abs().max() > ORTHO_TOL {
                    return Err(Error::Domain("matrix is not orthogonal within 1e-12".into()));
                }
            }
            ElementaryMap::Inversion => {}
        }
        Ok(())
    }

    fn apply(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(match self {
            ElementaryMap::Translation(b) => z + b,
            ElementaryMap::Scaling(lambda) => z * *lambda,
            ElementaryMap::Orthogonal(r) => r * z,
            ElementaryMap::Inversion => {
                let n2 = z.norm_squared();
                if n2 < POLE_EPS {
                    return Err(Error::Pole);
                }
                z / n2
            }
        })
    }

    fn jacobian_det(&self, z: &DVector<f64>) -> Result<f64> {
        let n = z.len() as i32;
        Ok(match self {
            ElementaryMap::Translation(_) => 1.0,
            ElementaryMap::Scaling(lambda) => lambda.powi(n),
            ElementaryMap::Orthogonal(r) => r.clone().determinant(),
            ElementaryMap::Inversion => {
                let n2 = z.norm_squared();
                if n2 < POLE_EPS {
                    return Err(Error::Pole);
                }
                -1.0 / n2.powi(n)
            }
        })
    }

    fn differential(&self, z: &DVector<f64>) -> Result<DMatrix<f64>> {
        let dim = z.len();
        Ok(match self {
            ElementaryMap::Translation(_) => DMatrix::identity(dim, dim),
            ElementaryMap::Scaling(lambda) => DMatrix::identity(dim, dim) * *lambda,
            ElementaryMap::Orthogonal(r) => r.clone(),
            ElementaryMap::Inversion => {
                let n2 = z.norm_squared();
                if n2 < POLE_EPS {
                    return Err(Error::Pole);
                }
                let unit = z / n2.sqrt();
                (DMatrix::identity(dim, dim) - outer(&unit, &unit) * 2.0) / n2
            }
        })
    }
}

/// Ordered composition of elementary maps, applied left to right.
#[derive(Debug, Clone)]
pub struct MobiusMap {
    maps: Vec<ElementaryMap>,
    dim: usize,
}

impl MobiusMap {
    pub fn identity(dim: usize) -> Self {
        MobiusMap { maps: Vec::new(), dim }
    }

    pub fn new(dim: usize, maps: Vec<ElementaryMap>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain("Mobius maps need dimension >= 2".into()));
        }
        for m in &maps {
            m.check(dim)?;
        }
        Ok(MobiusMap { maps, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stages(&self) -> &[ElementaryMap] {
        &self.maps
    }

    /// Composition `self` followed by `other`.
    pub fn then(mut self, other: &MobiusMap) -> Self {
        self.maps.extend(other.maps.iter().cloned());
        self
    }

    pub fn apply(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        let mut w = z.clone();
        for m in &self.maps {
            w = m.apply(&w)?;
        }
        Ok(w)
    }

    /// Chain-rule product of the stage Jacobian determinants.
    pub fn jacobian_det(&self, z: &DVector<f64>) -> Result<f64> {
        let mut w = z.clone();
        let mut det = 1.0;
        for m in &self.maps {
            det *= m.jacobian_det(&w)?;
            w = m.apply(&w)?;
        }
        Ok(det)
    }

    /// Chain-rule product of the stage differentials.
    pub fn differential(&self, z: &DVector<f64>) -> Result<DMatrix<f64>> {
        let mut w = z.clone();
        let mut d = DMatrix::<f64>::identity(self.dim, self.dim);
        for m in &self.maps {
            d = m.differential(&w)? * d;
            w = m.apply(&w)?;
        }
        Ok(d)
    }

    /// The function pushforward `(M^# f)(z) = |det M'(z)|^{(n-p)/(np)} f(M(z))`;
    /// the prefactor is identically one at `p = n`.
    pub fn pushforward<'a, F>(&'a self, f: F, p: f64) -> impl Fn(&DVector<f64>) -> Result<f64> + 'a
    where
        F: Fn(&DVector<f64>) -> f64 + 'a,
    {
        let alpha = (self.dim as f64 - p) / (self.dim as f64 * p);
        move |z: &DVector<f64>| {
            let image = self.apply(z)?;
            if alpha == 0.0 {
                Ok(f(&image))
            } else {
                Ok(self.jacobian_det(z)?.abs().powf(alpha) * f(&image))
            }
        }
    }
}

/// The Cayley-type involution
/// `B(x, y) = (2x, 1 - |x|^2 - y^2) / ((1+y)^2 + |x|^2)`,
/// which exchanges the half-space `y > 0` and the unit ball.
pub fn cayley(z: &DVector<f64>) -> Result<DVector<f64>> {
    let dim = z.len();
    if dim < 2 {
        return Err(Error::Domain("cayley needs dimension >= 2".into()));
    }
    let y = z[dim - 1];
    let x2: f64 = z.rows(0, dim - 1).norm_squared();
    let denom = (1.0 + y) * (1.0 + y) + x2;
    if denom < POLE_EPS {
        return Err(Error::Pole);
    }
    let mut out = DVector::zeros(dim);
    for i in 0..dim - 1 {
        out[i] = 2.0 * z[i] / denom;
    }
    out[dim - 1] = (1.0 - x2 - y * y) / denom;
    Ok(out)
}

/// The six-stage decomposition `R o J o T_{e_n} o S_2 o J o T_{-e_n}` with
/// `R = diag(1, ..., 1, -1)`, equal to [`cayley`] pointwise.
pub fn cayley_as_composition(dim: usize) -> Result<MobiusMap> {
    if dim < 2 {
        return Err(Error::Domain("cayley needs dimension >= 2".into()));
    }
    let mut e_n = DVector::zeros(dim);
    e_n[dim - 1] = 1.0;
    let mut reflect = DMatrix::<f64>::identity(dim, dim);
    reflect[(dim - 1, dim - 1)] = -1.0;
    MobiusMap::new(
        dim,
        vec![
            ElementaryMap::Translation(-e_n.clone()),
            ElementaryMap::Inversion,
            ElementaryMap::Scaling(2.0),
            ElementaryMap::Translation(e_n),
            ElementaryMap::Inversion,
            ElementaryMap::Orthogonal(reflect),
        ],
    )
}

/// Closed-form Jacobian determinant `det B'(z) = -(2/((1+y)^2+|x|^2))^n`.
pub fn cayley_jacobian_det(z: &DVector<f64>) -> Result<f64> {
    let dim = z.len();
    let y = z[dim - 1];
    let x2: f64 = z.rows(0, dim - 1).norm_squared();
    let denom = (1.0 + y) * (1.0 + y) + x2;
    if denom < POLE_EPS {
        return Err(Error::Pole);
    }
    Ok(-(2.0 / denom).powi(dim as i32))
}
