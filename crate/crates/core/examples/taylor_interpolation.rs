//! Expanding an element of W_c^n in the well-poised basis and recovering it
//! from its values at the nodes a q^k.

use ellhyp::expansion::{interpolate, interpolation_prefactor, taylor_coeffs};
use ellhyp::operator::WcnElement;
use ellhyp::{c64, relative_residual, EllipticParams, Error, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let params = EllipticParams::new(c64(0.8, -0.15), c64(0.55, 0.3))?;
    let c = c64(0.4, -0.9);
    let f = WcnElement::new(vec![c64(0.5, 0.1), c64(1.0, -0.7), c64(-0.2, 0.4), c64(0.9, 0.9)], c64(1.2, 0.5), c)?
        .to_function(&params, &policy);
    let (a, z) = (c64(-0.6, 0.7), c64(0.3, 1.1));

    let tc = taylor_coeffs(&f, a, c, 3, &params, &policy)?;
    for (k, fk) in tc.f_k.iter().enumerate() {
        println!("f_{k} = {fk:.10}");
    }
    let rebuilt = tc.reconstruct(z, &params, &policy)?;
    println!("reconstruction residual {:.1e}", relative_residual(rebuilt, f.eval(z)?));

    let lhs = interpolation_prefactor(a, c, 3, z, &params, &policy)? * f.eval(z)?;
    let rhs = interpolate(&f, a, c, 3, z, &params, &policy)?;
    println!("interpolation residual  {:.1e}", relative_residual(lhs, rhs));

    // asking for too low a degree is detected
    match taylor_coeffs(&f, a, c, 2, &params, &policy) {
        Err(Error::DegreeOverflow { mismatch, .. }) => println!("degree 2 rejected (mismatch {mismatch:.1e})"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
