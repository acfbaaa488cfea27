//! The cubic theta function: lattice sum, symmetries, splittings, addition
//! formulae and the cubic analogue of Jackson's summation.

use ellhyp::cubic::{
    cooper_toh_first_residual, cooper_toh_second_residual, cubic_jackson_lhs, cubic_jackson_rhs, gamma,
    gamma_double_loop, gamma_functional_eq_residual, gamma_splitting_residuals, gamma_symmetry_residuals, CubicFamily,
};
use ellhyp::params::ipow;
use ellhyp::{c64, relative_residual, EllipticParams, Result, TruncationPolicy};

fn fmt(r: &[f64]) -> String {
    r.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" ")
}

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let s = c64(0.82, 0.15);
    let p = ipow(s, 6);
    let (z, a) = (c64(0.9, -0.3), c64(0.6, 0.5));

    let g = gamma(z, a, p, &policy)?;
    println!("gamma(z,a;p) = {g:.14}");
    println!("double loop  = {:.14}", gamma_double_loop(z, a, p, 30));
    println!("symmetries   {}", fmt(&gamma_symmetry_residuals(z, a, p, &policy)?));
    println!("functional equation (2,-1) {:.1e}", gamma_functional_eq_residual(z, a, s, 2, -1, &policy)?);
    println!("splittings   {}", fmt(&gamma_splitting_residuals(z, a, s, &policy)?));
    let (z2, z3, w) = (c64(1.2, 0.4), c64(-0.7, 0.6), c64(0.4, -0.9));
    let first = cooper_toh_first_residual(z, z2, z3, w, p, &policy)?;
    let second = cooper_toh_second_residual(z, a, z2, z3, s, &policy)?;
    println!("addition formulae {first:.1e} {second:.1e}");

    let params = EllipticParams::new(c64(0.8, 0.2), s)?;
    let (b, c) = (c64(1.1, 0.3), c64(-0.5, 0.7));
    for family in [CubicFamily::First, CubicFamily::Second] {
        let lhs = cubic_jackson_lhs(family, a, b, c, z, 3, &params, &policy)?;
        let rhs = cubic_jackson_rhs(family, a, b, c, z, 3, &params, &policy)?;
        println!("{} cubic Jackson, n = 3: residual {:.1e}", family.name(), relative_residual(lhs, rhs));
    }
    Ok(())
}
