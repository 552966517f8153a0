use hardylab::potentials::{HalfSpacePoint, PotentialContext};
fn main() {
    let ctx = PotentialContext::new(4, 2.5).unwrap();
    let s = 3e4f64;
    let c = ctx.c_np().unwrap();
    let delta = (c / s).powf((2.5 - 1.0) / (4.0 - 2.5));
    println!("delta = {delta:e}");
    // axis values around the bracket
    for dy in [1e-14f64, 1e-13, 1e-10, 1e-7, delta, 1.0001*delta, 2.0*delta] {
        let pt = HalfSpacePoint { r: 0.0, y: 1.0 + dy };
        println!("U(0,1+{dy:.2e}) = {:?}", ctx.u(&pt));
        let pt = HalfSpacePoint { r: 0.0, y: 1.0 - dy };
        println!("U(0,1-{dy:.2e}) = {:?}", ctx.u(&pt));
    }
    // p-laplacian at points in the region
    for (r, dy) in [(1e-6, 1e-13), (1e-6, 1e-6), (4e-6, 1e-7), (1e-8, 1e-13)] {
        let pt = HalfSpacePoint { r, y: 1.0 + dy };
        println!("lap({r:e},1+{dy:e}) = {:?}", ctx.p_laplacian_u(&pt));
    }
}
