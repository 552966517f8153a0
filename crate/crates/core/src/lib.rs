//! Numerical verification laboratory for Hardy-type inequalities on the
//! half-space.
//!
//! The crate implements, in closed form, the Möbius transformation group and
//! the Cayley-type map between the half-space and the unit ball, the
//! reflected fundamental solution of the p-Laplacian together with its
//! gradient and p-Laplacian, the improved Hardy potentials built from it,
//! and harmonic transplantation between balls, the whole space and the
//! half-space.  Adaptive quadrature (1-D Gauss-Kronrod and 2-D axisymmetric
//! cubature with singular-point handling) turns the closed forms into
//! checkable inequalities: best constants, sign conditions, isometries and
//! limits are verified by the experiment registry in [`experiments`].

// Quadrature node tables keep their full published digits, and the
// `!(x > 0)` comparisons are deliberate NaN-rejecting guards.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod experiments;
pub mod functionals;
pub mod linalg;
pub mod mobius;
pub mod params;
pub mod potentials;
pub mod quadrature;
pub mod special;
pub mod testing;
pub mod transplant;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
