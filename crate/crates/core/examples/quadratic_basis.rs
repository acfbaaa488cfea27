//! Expansion in the quadratic basis and the summations it yields.

use ellhyp::expansion::{
    pseudo_quadratic_closed_form, pseudo_quadratic_lhs, pseudo_quadratic_series, quadratic_summation_lhs,
    quadratic_summation_rhs, quadratic_taylor_coeffs,
};
use ellhyp::operator::WcnElement;
use ellhyp::{c64, relative_residual, EllipticParams, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let params = EllipticParams::new(c64(0.8, 0.1), c64(0.45, 0.35))?;
    let (a, c, z) = (c64(0.7, -0.3), c64(0.5, 0.6), c64(-0.4, 1.1));

    let f = WcnElement::new(vec![c64(1.0, 0.0), c64(0.4, -0.8), c64(-0.6, 0.2)], c64(0.9, 0.4), c)?
        .to_function(&params, &policy);
    let tc = quadratic_taylor_coeffs(&f, c, 2, &params, &policy)?;
    println!("quadratic-basis round trip residual {:.1e}", relative_residual(tc.reconstruct(z, &params, &policy)?, f.eval(z)?));

    for n in [1, 3, 5] {
        let s = relative_residual(
            quadratic_summation_lhs(a, c, n, z, &params, &policy)?,
            quadratic_summation_rhs(a, c, n, z, &params, &policy)?,
        );
        let series = pseudo_quadratic_series(a, c, n, z, &params, &policy)?;
        let r1 = relative_residual(pseudo_quadratic_lhs(a, c, n, z, &params, &policy)?, series);
        let r2 = relative_residual(series, pseudo_quadratic_closed_form(a, c, n, z, &params, &policy)?);
        println!("n = {n}: quadratic summation {s:.1e}, pseudo-quadratic {r1:.1e} / {r2:.1e}");
    }
    Ok(())
}
