//! The elliptic Askey-Wilson operator: degree lowering on the well-poised
//! basis, the explicit formula for its iterates, and annihilation of W_c^n.

use ellhyp::operator::{annihilation_defect, apply_d, apply_d_iter, cooper_explicit, degree_lowering, wp_basis, WcnElement};
use ellhyp::{c64, relative_residual, EllipticParams, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let params = EllipticParams::new(c64(0.85, 0.1), c64(0.6, 0.25))?;
    let (a, c, z) = (c64(0.7, 0.3), c64(-0.5, 0.8), c64(1.2, -0.4));

    let f = wp_basis(a, c, 4, &params, &policy);
    let d = apply_d(&f, c, &params, &policy).eval(z)?;
    let closed = degree_lowering(a, c, 4, z, &params, &policy)?;
    println!("D (az,a/z)_4/(cz,c/z)_4 : {d:.10}  closed form {closed:.10}");

    let el = WcnElement::new(vec![c64(1.0, 0.5), c64(-0.3, 0.2), c64(0.8, -1.1), c64(0.4, 0.0)], a, c)?;
    let g = el.to_function(&params, &policy);
    for m in 1..=3 {
        let recursive = apply_d_iter(&g, c, m, &params, &policy).eval(z)?;
        let explicit = cooper_explicit(&g, c, m, z, &params, &policy)?;
        println!("m = {m}: recursive vs explicit residual {:.1e}", relative_residual(recursive, explicit));
    }
    println!("D^(3) f is constant: defect {:.1e}", annihilation_defect(&g, c, 3, z, &params, &policy)?);
    Ok(())
}
