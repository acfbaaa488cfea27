//! Karlsson-Minton type identities: a terminating 12V11 sum that
//! factorises, and the theta-product form with free b_j.

use ellhyp::expansion::{km_12v11_lhs, km_12v11_rhs, km_theta_lhs, km_theta_rhs};
use ellhyp::{c64, relative_residual, EllipticParams, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let params = EllipticParams::new(c64(0.82, 0.12), c64(0.6, -0.2))?;
    let (a, b, d, z) = (c64(0.7, 0.4), c64(1.1, -0.3), c64(-0.5, 0.9), c64(0.6, 0.8));

    for (n, s) in [(2, 1), (4, 2), (5, 0)] {
        let lhs = km_12v11_lhs(a, b, d, n, s, z, &params, &policy)?;
        let rhs = km_12v11_rhs(a, b, d, n, s, z, &params, &policy)?;
        println!("12V11, n = {n}, s = {s}: residual {:.1e}", relative_residual(lhs, rhs));
    }

    let bs = [c64(0.9, 0.2), c64(-0.4, 1.0), c64(1.3, -0.6)];
    let lhs = km_theta_lhs(a, &bs, z, &params, &policy)?;
    let rhs = km_theta_rhs(a, &bs, z, false, &params, &policy)?;
    println!("theta products, 3 factors: {lhs:.10} = {rhs:.10}");
    Ok(())
}
