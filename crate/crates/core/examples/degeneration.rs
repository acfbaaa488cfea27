//! The p -> 0 limits of the two cubic shifted factorials: the first tends to
//! the basic factorial at first order, the second does not converge.

use ellhyp::cubic::{degeneration_check, CubicFamily};
use ellhyp::{c64, Result, TruncationPolicy};

fn main() -> Result<()> {
    let policy = TruncationPolicy::default();
    let (a, z, q) = (c64(0.6, 0.3), c64(0.8, -0.5), c64(0.4, 0.1));
    let ps = [1e-3, 1e-4, 1e-5, 1e-6];
    for family in [CubicFamily::First, CubicFamily::Second] {
        let study = degeneration_check(family, a, z, q, 3, &ps, &policy)?;
        println!("{} family", family.name());
        for (p, r) in study.p_values.iter().zip(&study.residuals) {
            println!("  p = {p:.0e}: residual {r:.3e}");
        }
        println!("  decreasing: {}, empirical order: {:?}", study.monotone, study.empirical_order);
    }
    Ok(())
}
