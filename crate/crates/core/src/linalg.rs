//! Rank-one matrix identities: determinant and inverse of `I + t v (x) v`.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

const UNIT_TOL: f64 = 1e-12;

fn check_unit(v: &DVector<f64>) -> Result<()> {
    if (v.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!(
            "expected a unit vector, |v| = {}",
            v.norm()
        )));
    }
    Ok(())
}

/// Outer product `v (x) w`.
pub fn outer(v: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    v * w.transpose()
}

/// `det(I + t v (x) v) = 1 + t` for a unit vector `v`.
///
/// The matrix has eigenvalue `1` with multiplicity `n-1` and eigenvalue
/// `1 + t` with eigenvector `v`.
pub fn rank_one_det(v: &DVector<f64>, t: f64) -> Result<f64> {
    check_unit(v)?;
    Ok(1.0 + t)
}

/// Inverse of `I + t v (x) v`, namely `I - t/(1+t) v (x) v`; requires `t != -1`.
pub fn rank_one_inverse(v: &DVector<f64>, t: f64) -> Result<DMatrix<f64>> {
    check_unit(v)?;
    if t == -1.0 {
        return Err(Error::SingularMatrix);
    }
    let n = v.len();
    Ok(DMatrix::identity(n, n) - outer(v, v) * (t / (t + 1.0)))
}

/// The matrix `I + t v (x) v` itself (used by tests and by the inversion
/// differential).
pub fn rank_one_update(v: &DVector<f64>, t: f64) -> DMatrix<f64> {
    let n = v.len();
    DMatrix::identity(n, n) + outer(v, v) * t
}
