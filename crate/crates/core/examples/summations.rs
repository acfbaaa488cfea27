//! The Frenkel-Turaev 10V9 summation at a random balanced point, and
//! Jackson's 8phi7 summation it reduces to at p = 0.

use ellhyp::series::{ft_rhs, jackson_8phi7_sides, vwp_sum, BalancedQuintuple};
use ellhyp::{c64, relative_residual, EllipticParams, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let params = EllipticParams::new(c64(0.78, 0.21), c64(0.62, -0.3))?;
    let (a, b, c, d) = (c64(0.6, 0.2), c64(0.9, -0.3), c64(1.1, 0.4), c64(0.7, 0.0));

    for n in 0..=6 {
        // e is fixed by the balancing condition a^2 q^{n+1} = bcde
        let q5 = BalancedQuintuple::solve(a, b, c, d, n, params.q())?;
        let series = vwp_sum(&q5.spec_10v9(&params)?, &params, &policy)?;
        let closed = ft_rhs(&q5, &params, &policy)?;
        println!("n = {n}: series {series:.12}  product {closed:.12}  residual {:.1e}", relative_residual(series, closed));
    }

    let basic = EllipticParams::basic(c64(0.78, 0.21))?;
    let q5 = BalancedQuintuple::solve(a, b, c, d, 5, basic.q())?;
    let (lhs, rhs) = jackson_8phi7_sides(&q5, basic.q())?;
    println!("Jackson 8phi7, n = 5: residual {:.1e}", relative_residual(lhs, rhs));
    Ok(())
}
