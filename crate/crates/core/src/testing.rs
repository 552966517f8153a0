//! Small assertion helpers shared by unit, integration and acceptance tests.

/// Relative error with a graceful fallback near zero.
pub fn rel_err(got: f64, want: f64) -> f64 {
    let scale = want.abs().max(1e-300);
    (got - want).abs() / scale
}

/// Error relative to `max(|got|, |want|, floor)`.
pub fn sym_rel_err(got: f64, want: f64, floor: f64) -> f64 {
    (got - want).abs() / got.abs().max(want.abs()).max(floor)
}

#[track_caller]
pub fn assert_rel(got: f64, want: f64, tol: f64) {
    let err = rel_err(got, want);
    assert!(
        err <= tol,
        "relative error {err:.3e} > {tol:.1e} (got {got:.17e}, want {want:.17e})"
    );
}

#[track_caller]
pub fn assert_abs(got: f64, want: f64, tol: f64) {
    let err = (got - want).abs();
    assert!(
        err <= tol,
        "absolute error {err:.3e} > {tol:.1e} (got {got:.17e}, want {want:.17e})"
    );
}
