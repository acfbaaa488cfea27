//! The modified Jacobi theta function and elliptic shifted factorials.

use ellhyp::pochhammer::qp_fact;
use ellhyp::theta::{addition_formula_residual, theta, theta_inversion_residual, theta_p_shift_residual};
use ellhyp::{c64, EllipticParams, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let p = c64(0.3, 0.1);
    let x = c64(0.7, -0.4);

    println!("theta(x;0)   = {}", theta(x, c64(0.0, 0.0), &policy)?);
    println!("theta(x;p)   = {}", theta(x, p, &policy)?);
    println!("inversion    residual {:.1e}", theta_inversion_residual(x, p, &policy)?);
    println!("p-shift      residual {:.1e}", theta_p_shift_residual(x, p, &policy)?);
    let (y, u, v) = (c64(1.1, 0.2), c64(-0.6, 0.9), c64(0.4, 0.3));
    println!("addition     residual {:.1e}", addition_formula_residual(x, y, u, v, p, &policy)?);

    let params = EllipticParams::with_principal_roots(c64(0.5, 0.2), p)?;
    for n in [-2, 0, 1, 4] {
        println!("(a;q,p)_{n:<2} = {}", qp_fact(x, n, &params, &policy)?);
    }
    Ok(())
}
