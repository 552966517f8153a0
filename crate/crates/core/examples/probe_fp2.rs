use hardylab::potentials::PotentialContext;
use hardylab::quadrature::{superlevel_integral, QuadSpec};
fn main() {
    let spec = QuadSpec::default().with_rel_tol(1e-7);
    let ctx = PotentialContext::new(4, 2.5).unwrap();
    for s in [1e-6, 3e-6, 1e3, 1e4, 3e4, 1e5] {
        match superlevel_integral(&ctx, s, &spec) {
            Ok(r) => println!("F({s:e}) = {:+.6e} err {:.1e} conv {}", r.value, r.error_estimate, r.converged),
            Err(e) => println!("F({s:e}) ERR {e}"),
        }
    }
}
