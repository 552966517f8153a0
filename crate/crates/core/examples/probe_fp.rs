use hardylab::potentials::PotentialContext;
use hardylab::quadrature::{superlevel_integral, QuadSpec};
use std::time::Instant;

fn main() {
    let spec = QuadSpec::default().with_rel_tol(1e-6);
    for (n, p) in [(5u32, 3.0f64), (4, 2.5), (6, 3.5), (4, 2.0)] {
        let ctx = PotentialContext::new(n, p).unwrap();
        println!("== (n,p) = ({n},{p})  C(n,p) = {:?}", ctx.c_np().ok());
        for s in [1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 5.0, 100.0] {
            let t0 = Instant::now();
            match superlevel_integral(&ctx, s, &spec) {
                Ok(r) => println!(
                    "  F({s:>8.0e}) = {:+.8e}  err {:.1e} conv {} evals {}  [{:?}]",
                    r.value, r.error_estimate, r.converged, r.evaluations, t0.elapsed()
                ),
                Err(e) => println!("  F({s:>8.0e}) : ERROR {e}"),
            }
        }
    }
}
