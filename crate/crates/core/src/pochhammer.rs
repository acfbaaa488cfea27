//! Theta shifted factorials `(a;q,p)_n` for every integer `n`, their
//! multi-parameter products, and the elliptic binomial coefficient.

use crate::error::{Error, Result};
use crate::params::{relative_residual, EllipticParams, TruncationPolicy, C64};
use crate::scaled::Scaled;
use crate::theta::{theta, theta_divisor};

/// `(a;b,p)_n` with an arbitrary base `b`.
///
/// `n ≥ 0`: `∏_{k<n} θ(a b^k;p)`. `n < 0`: `1 / ∏_{k<-n} θ(a b^{n+k};p)`, which
/// reports `PoleHit` when one of those factors vanishes. Arguments advance by
/// repeated multiplication with the base.
pub fn qp_fact_base(
    a: C64,
    base: C64,
    n: i64,
    p: C64,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    if n >= 0 {
        let mut acc = one;
        let mut arg = a;
        for _ in 0..n {
            acc *= theta(arg, p, policy)?;
            arg *= base;
        }
        Ok(acc)
    } else {
        let mut den = one;
        let mut arg = a / crate::params::ipow(base, -n);
        for k in 0..-n {
            den *= theta_divisor(arg, p, policy, "negative-index factorial", k)?;
            arg *= base;
        }
        Ok(one / den)
    }
}

/// `(a;q,p)_n` for the base and nome in `params`.
pub fn qp_fact(a: C64, n: i64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    qp_fact_base(a, params.q(), n, params.p(), policy)
}

/// `(a_1,…,a_m;q,p)_n`; the empty list gives 1.
pub fn qp_fact_multi(
    args: &[C64],
    n: i64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    args.iter().try_fold(C64::new(1.0, 0.0), |acc, &a| {
        Ok(acc * qp_fact(a, n, params, policy)?)
    })
}

/// `(a_1,…,a_m;b,p)_n` for a nonnegative `n`, checked for use as a divisor:
/// any factor on the zero lattice raises `PoleHit` tagged with `context`.
pub fn qp_denominator_base(
    args: &[C64],
    base: C64,
    n: i64,
    p: C64,
    policy: &TruncationPolicy,
    context: &'static str,
) -> Result<C64> {
    if n < 0 {
        // reciprocal of a reciprocal product: the zeros now sit in the numerator
        let mut acc = C64::new(1.0, 0.0);
        for &a in args {
            acc *= qp_fact_base(a, base, n, p, policy)?;
        }
        if acc == C64::new(0.0, 0.0) || !acc.is_finite() {
            return Err(Error::PoleHit { context, index: n });
        }
        return Ok(acc);
    }
    let mut acc = C64::new(1.0, 0.0);
    for &a in args {
        let mut arg = a;
        for k in 0..n {
            acc *= theta_divisor(arg, p, policy, context, k)?;
            arg *= base;
        }
    }
    Ok(acc)
}

/// [`qp_denominator_base`] with base `q`.
pub fn qp_denominator(
    args: &[C64],
    n: i64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
    context: &'static str,
) -> Result<C64> {
    qp_denominator_base(args, params.q(), n, params.p(), policy, context)
}

/// `(num_1,…;b,p)_n / (den_1,…;b,p)_n`, carried with a separate exponent so
/// that huge or tiny partial products neither overflow nor flush to zero.
/// Denominator zeros raise `PoleHit`.
pub fn qp_ratio_scaled_base(
    num: &[C64],
    den: &[C64],
    base: C64,
    n: i64,
    p: C64,
    policy: &TruncationPolicy,
    context: &'static str,
) -> Result<Scaled> {
    if n < 0 {
        let top = num.iter().try_fold(Scaled::one(), |acc, &a| {
            Ok::<_, Error>(acc * qp_fact_base(a, base, n, p, policy)?)
        })?;
        let bottom = qp_denominator_base(den, base, n, p, policy, context)?;
        return Ok(top / bottom);
    }
    let mut acc = Scaled::one();
    let mut nargs = num.to_vec();
    let mut dargs = den.to_vec();
    for k in 0..n {
        for x in nargs.iter_mut() {
            acc = acc * theta(*x, p, policy)?;
            *x *= base;
        }
        for x in dargs.iter_mut() {
            acc = acc / theta_divisor(*x, p, policy, context, k)?;
            *x *= base;
        }
    }
    Ok(acc)
}

/// [`qp_ratio_scaled_base`] as a plain value.
pub fn qp_ratio_base(
    num: &[C64],
    den: &[C64],
    base: C64,
    n: i64,
    p: C64,
    policy: &TruncationPolicy,
    context: &'static str,
) -> Result<C64> {
    Ok(qp_ratio_scaled_base(num, den, base, n, p, policy, context)?.value())
}

/// [`qp_ratio_scaled_base`] with base `q`.
pub fn qp_ratio_scaled(
    num: &[C64],
    den: &[C64],
    n: i64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
    context: &'static str,
) -> Result<Scaled> {
    qp_ratio_scaled_base(num, den, params.q(), n, params.p(), policy, context)
}

/// [`qp_ratio_base`] with base `q`.
pub fn qp_ratio(
    num: &[C64],
    den: &[C64],
    n: i64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
    context: &'static str,
) -> Result<C64> {
    qp_ratio_base(num, den, params.q(), n, params.p(), policy, context)
}

/// Residual of `(pa;q,p)_n = (-1)^n a^{-n} q^{-n(n-1)/2} (a;q,p)_n`, `n ≥ 0`.
pub fn qp_fact_pshift_residual(
    a: C64,
    n: i64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!(
            "p-shift residual needs n >= 0, got {n}"
        )));
    }
    if a == C64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("qp_fact_pshift_residual"));
    }
    let lhs = qp_fact(params.p() * a, n, params, policy)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = sign
        * crate::params::ipow(a, -n)
        * params.q_pow(-(n * (n - 1) / 2))
        * qp_fact(a, n, params, policy)?;
    Ok(relative_residual(lhs, rhs))
}

/// Elliptic binomial `[m k] = (q^{1+k};q,p)_{m-k} / (q;q,p)_{m-k}`.
pub fn elliptic_binomial(
    m: i64,
    k: i64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    if m < 0 || k < 0 || k > m {
        return Err(Error::InvalidParameter(format!(
            "elliptic binomial needs 0 <= k <= m, got m={m}, k={k}"
        )));
    }
    let num = qp_fact(params.q_pow(1 + k), m - k, params, policy)?;
    let den = qp_denominator(&[params.q()], m - k, params, policy, "elliptic binomial")?;
    Ok(num / den)
}
