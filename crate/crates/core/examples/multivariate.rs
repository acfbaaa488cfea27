//! Multivariate Taylor expansion and interpolation for a function of three
//! variables, each in its own W_{c_i}^{n_i}.

use ellhyp::expansion::{interpolate_multi, interpolation_prefactor_multi, reconstruct_multi, taylor_coeffs_multi, MultivarConfig};
use ellhyp::operator::{MultiFunction, WcnElement};
use ellhyp::{c64, relative_residual, EllipticParams, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let params = EllipticParams::new(c64(0.8, 0.2), c64(0.5, -0.3))?;
    let a = vec![c64(0.6, 0.3), c64(-0.4, 0.8), c64(1.1, -0.2)];
    let c = vec![c64(0.9, -0.5), c64(0.3, 0.7), c64(-0.8, -0.4)];
    let n = vec![2, 1, 3];

    let parts = (0..3)
        .map(|i| {
            let coeffs = (0..=n[i]).map(|k| c64(1.0 / (k + 1) as f64, 0.3 * k as f64)).collect();
            Ok(WcnElement::new(coeffs, c64(0.5, 0.5 * i as f64), c[i])?.to_function(&params, &policy))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = MultiFunction::separable(parts);
    let cfg = MultivarConfig::new(a, c, n)?;
    let z = [c64(0.7, 0.9), c64(1.3, -0.2), c64(-0.5, 0.6)];

    let coeffs = taylor_coeffs_multi(&f, &cfg, &params, &policy)?;
    println!("f_(1,0,2) = {:.10}", coeffs.get(&[1, 0, 2]));
    let rebuilt = reconstruct_multi(&coeffs, &cfg, &z, &params, &policy)?;
    println!("Taylor reconstruction residual {:.1e}", relative_residual(rebuilt, f.eval(&z)?));

    let lhs = interpolation_prefactor_multi(&cfg, &z, &params, &policy)? * f.eval(&z)?;
    let rhs = interpolate_multi(&f, &cfg, &z, &params, &policy)?;
    println!("interpolation residual         {:.1e}", relative_residual(lhs, rhs));
    Ok(())
}
