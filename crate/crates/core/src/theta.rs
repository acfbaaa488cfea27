//! The modified Jacobi theta function `θ(x;p) = ∏_{j≥0} (1 - p^j x)(1 - p^{j+1}/x)`
//! and its structural identities as residual checks.

use crate::error::{Error, Result};
use crate::params::{ipow, TruncationPolicy, C64, MAX_NOME_MODULUS};

/// Relative distance below which a theta argument counts as a zero of `θ(·;p)`.
pub const POLE_TOL: f64 = 1e-10;

/// Consecutive sub-threshold factors required before a product is truncated.
const QUIET_FACTORS: usize = 3;

fn check_nome(p: C64) -> Result<()> {
    let m = p.norm();
    if !(m <= MAX_NOME_MODULUS) {
        return Err(Error::NomeOutOfRange(m));
    }
    Ok(())
}

/// `θ(x;p)`. For `p = 0` this is exactly `1 - x` (also at `x = 0`, where the
/// product is still defined); for `p ≠ 0` the argument must be nonzero.
pub fn theta(x: C64, p: C64, policy: &TruncationPolicy) -> Result<C64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("theta argument"));
    }
    check_nome(p)?;
    let one = C64::new(1.0, 0.0);
    if p == C64::new(0.0, 0.0) {
        return Ok(one - x);
    }
    if x == C64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("theta"));
    }
    let mut prod = one;
    let mut lead = x;
    let mut trail = p / x;
    let mut quiet = 0;
    for _ in 0..policy.max_factors {
        prod *= (one - lead) * (one - trail);
        if lead.norm() < policy.tail_tol && trail.norm() < policy.tail_tol {
            quiet += 1;
            if quiet >= QUIET_FACTORS {
                return Ok(prod);
            }
        } else {
            quiet = 0;
        }
        lead *= p;
        trail *= p;
    }
    Err(Error::TruncationExhausted {
        factors: policy.max_factors,
    })
}

/// `θ(x_1, …, x_m; p) = ∏ θ(x_k; p)`; the empty product is 1.
pub fn theta_multi(xs: &[C64], p: C64, policy: &TruncationPolicy) -> Result<C64> {
    xs.iter()
        .try_fold(C64::new(1.0, 0.0), |acc, &x| Ok(acc * theta(x, p, policy)?))
}

/// Relative distance of `x` from the zero set `p^Z` of `θ(·;p)`.
pub fn lattice_defect(x: C64, p: C64) -> f64 {
    let one = C64::new(1.0, 0.0);
    if p == C64::new(0.0, 0.0) {
        return (x - one).norm();
    }
    if x == C64::new(0.0, 0.0) {
        return f64::INFINITY;
    }
    let j = (x.norm().ln() / p.norm().ln()).round();
    if !j.is_finite() {
        return f64::INFINITY;
    }
    let j = j as i64;
    // a couple of neighbours guards against the rounding of ln|x|/ln|p|
    (j - 1..=j + 1)
        .map(|k| (x * ipow(p, -k) - one).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `θ(x;p)` for use as a divisor: fails with `PoleHit` when `x` sits on the zero lattice.
pub fn theta_divisor(
    x: C64,
    p: C64,
    policy: &TruncationPolicy,
    context: &'static str,
    index: i64,
) -> Result<C64> {
    if lattice_defect(x, p) < POLE_TOL {
        return Err(Error::PoleHit { context, index });
    }
    theta(x, p, policy)
}

/// `|θ(x;p) + x θ(1/x;p)| / max(|θ(x;p)|, |x θ(1/x;p)|)`.
pub fn theta_inversion_residual(x: C64, p: C64, policy: &TruncationPolicy) -> Result<f64> {
    if p == C64::new(0.0, 0.0) {
        if x == C64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("theta_inversion_residual"));
        }
        // (1 - x) + x(1 - 1/x) vanishes identically; skip the rounding of x * (1/x)
        return Ok(0.0);
    }
    let lhs = theta(x, p, policy)?;
    let rhs = -x * theta(x.inv(), p, policy)?;
    Ok(crate::params::relative_residual(lhs, rhs))
}

/// Residual of `θ(px;p) = -θ(x;p)/x`. Requires `p ≠ 0`.
pub fn theta_p_shift_residual(x: C64, p: C64, policy: &TruncationPolicy) -> Result<f64> {
    if p == C64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter(
            "p-shift check needs a nonzero nome".into(),
        ));
    }
    let lhs = theta(p * x, p, policy)?;
    let rhs = -theta(x, p, policy)? / x;
    Ok(crate::params::relative_residual(lhs, rhs))
}

/// Residual of the three-term addition formula
/// `θ(xy,x/y,uv,u/v) - θ(xv,x/v,uy,u/y) = (u/y) θ(yv,y/v,xu,x/u)`,
/// measured against the largest of the three terms.
pub fn addition_formula_residual(
    x: C64,
    y: C64,
    u: C64,
    v: C64,
    p: C64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    for w in [x, y, u, v] {
        if w == C64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("addition_formula_residual"));
        }
    }
    let t1 = theta_multi(&[x * y, x / y, u * v, u / v], p, policy)?;
    let t2 = theta_multi(&[x * v, x / v, u * y, u / y], p, policy)?;
    let t3 = (u / y) * theta_multi(&[y * v, y / v, x * u, x / u], p, policy)?;
    let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1e-300);
    Ok((t1 - t2 - t3).norm() / scale)
}

/// `∏_{j≥0} (1 - a·base^j)`.
pub fn euler_infinite_product(a: C64, base: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_nome(base)?;
    let one = C64::new(1.0, 0.0);
    if a == C64::new(0.0, 0.0) {
        return Ok(one);
    }
    if base == C64::new(0.0, 0.0) {
        return Ok(one - a);
    }
    let mut prod = one;
    let mut term = a;
    let mut quiet = 0;
    for _ in 0..policy.max_factors {
        prod *= one - term;
        if term.norm() < policy.tail_tol {
            quiet += 1;
            if quiet >= QUIET_FACTORS {
                return Ok(prod);
            }
        } else {
            quiet = 0;
        }
        term *= base;
    }
    Err(Error::TruncationExhausted {
        factors: policy.max_factors,
    })
}
