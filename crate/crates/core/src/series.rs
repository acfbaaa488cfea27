//! Terminating very-well-poised elliptic hypergeometric series, the
//! Frenkel–Turaev closed form, and Jackson's ₈φ₇ summation at `p = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ipow, relative_residual, EllipticParams, TruncationPolicy, C64};
use crate::pochhammer::qp_ratio;
use crate::sum::CompensatedSum;
use crate::theta::{theta, theta_divisor};

/// Relative tolerance on the balancing condition.
pub const BALANCE_TOL: f64 = 1e-10;
/// Relative tolerance on the terminating parameter `q^{-n}`.
pub const TERMINATION_TOL: f64 = 1e-12;

/// A terminating `_{s+1}V_s(a_1; a_6, …, a_{s+1}; q, p)` with argument `z`.
///
/// `upper` lists `a_6, …, a_{s+1}`; its last entry must be `q^{-n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VwpSpec {
    pub a1: C64,
    pub upper: Vec<C64>,
    pub n: usize,
    pub z_arg: C64,
}

impl VwpSpec {
    /// Validates termination and the balancing condition `q² ∏ a_i² = (a_1 q)^{s-5}`.
    pub fn new(a1: C64, upper: Vec<C64>, n: usize, params: &EllipticParams) -> Result<Self> {
        let spec = Self {
            a1,
            upper,
            n,
            z_arg: C64::new(1.0, 0.0),
        };
        spec.validate(params)?;
        Ok(spec)
    }

    /// Same as [`VwpSpec::new`] with a general series argument.
    pub fn with_argument(mut self, z: C64) -> Self {
        self.z_arg = z;
        self
    }

    /// `s` in `_{s+1}V_s`.
    pub fn s(&self) -> usize {
        self.upper.len() + 4
    }

    /// Relative defect of the balancing condition.
    pub fn balance_defect(&self, params: &EllipticParams) -> f64 {
        let q = params.q();
        let lhs = q * q * self.upper.iter().map(|a| a * a).product::<C64>();
        let rhs = ipow(self.a1 * q, self.s() as i64 - 5);
        relative_residual(lhs, rhs)
    }

    pub fn validate(&self, params: &EllipticParams) -> Result<()> {
        if self.a1 == C64::new(0.0, 0.0) || self.upper.iter().any(|a| *a == C64::new(0.0, 0.0)) {
            return Err(Error::ZeroArgument("VwpSpec"));
        }
        let last = *self
            .upper
            .last()
            .ok_or_else(|| Error::InvalidParameter("VwpSpec needs at least one upper parameter".into()))?;
        let term = params.q_pow(-(self.n as i64));
        if relative_residual(last, term) > TERMINATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "last upper parameter must be q^-{}",
                self.n
            )));
        }
        let defect = self.balance_defect(params);
        if !(defect <= BALANCE_TOL) {
            return Err(Error::BalanceViolation(defect));
        }
        Ok(())
    }
}

/// `a, b, c, d, e` with `a² q^{n+1} = bcde`; `e` is always the solved parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancedQuintuple {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub e: C64,
    pub n: usize,
}

impl BalancedQuintuple {
    /// Solves `e = a² q^{n+1} / (bcd)` for the given base.
    pub fn solve(a: C64, b: C64, c: C64, d: C64, n: usize, q: C64) -> Result<Self> {
        for x in [a, b, c, d] {
            if x == C64::new(0.0, 0.0) {
                return Err(Error::ZeroArgument("BalancedQuintuple"));
            }
        }
        let e = a * a * ipow(q, n as i64 + 1) / (b * c * d);
        Ok(Self { a, b, c, d, e, n })
    }

    pub fn balance_defect(&self, q: C64) -> f64 {
        relative_residual(
            self.a * self.a * ipow(q, self.n as i64 + 1),
            self.b * self.c * self.d * self.e,
        )
    }

    /// The `_{10}V_9` whose sum the Frenkel–Turaev formula evaluates.
    pub fn spec_10v9(&self, params: &EllipticParams) -> Result<VwpSpec> {
        let qn = params.q_pow(-(self.n as i64));
        VwpSpec::new(self.a, vec![self.b, self.c, self.d, self.e, qn], self.n, params)
    }
}

/// Sum of the terminating series, `k = 0..=n`, accumulated with compensation.
pub fn vwp_sum(spec: &VwpSpec, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    spec.validate(params)?;
    let q = params.q();
    let p = params.p();
    let a1 = spec.a1;
    let theta_a1 = theta_divisor(a1, p, policy, "vwp_sum: theta(a1)", 0)?;

    let mut numer_args: Vec<C64> = Vec::with_capacity(spec.upper.len() + 1);
    numer_args.push(a1);
    numer_args.extend(spec.upper.iter().copied());
    let mut denom_args: Vec<C64> = Vec::with_capacity(spec.upper.len() + 1);
    denom_args.push(q);
    denom_args.extend(spec.upper.iter().map(|&ai| a1 * q / ai));

    let mut acc = CompensatedSum::new();
    let mut ratio = C64::new(1.0, 0.0);
    let step = q * spec.z_arg;
    let mut power = C64::new(1.0, 0.0);
    let mut wp_arg = a1;
    for k in 0..=spec.n as i64 {
        if k > 0 {
            for (num, den) in numer_args.iter_mut().zip(denom_args.iter_mut()) {
                ratio *= theta(*num, p, policy)?;
                ratio /= theta_divisor(*den, p, policy, "vwp_sum: lower factorial", k - 1)?;
                *num *= q;
                *den *= q;
            }
            power *= step;
            wp_arg *= q * q;
        }
        acc.add(theta(wp_arg, p, policy)? / theta_a1 * ratio * power);
    }
    let v = acc.finish();
    if !v.is_finite() {
        return Err(Error::NonFinite("vwp_sum"));
    }
    Ok(v)
}

/// Closed form `(aq, aq/bc, aq/bd, aq/cd)_n / (aq/b, aq/c, aq/d, aq/bcd)_n`.
pub fn ft_rhs(q5: &BalancedQuintuple, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    let (a, b, c, d) = (q5.a, q5.b, q5.c, q5.d);
    let aq = a * params.q();
    let n = q5.n as i64;
    qp_ratio(
        &[aq, aq / (b * c), aq / (b * d), aq / (c * d)],
        &[aq / b, aq / c, aq / d, aq / (b * c * d)],
        n,
        params,
        policy,
        "Frenkel-Turaev closed form",
    )
}

/// Classical `(x;q)_n` for `n ≥ 0`.
fn classical_fact(x: C64, q: C64, n: usize) -> C64 {
    let one = C64::new(1.0, 0.0);
    let mut acc = one;
    let mut arg = x;
    for _ in 0..n {
        acc *= one - arg;
        arg *= q;
    }
    acc
}

/// Residual between Jackson's terminating `_8φ_7` sum and its product form.
///
/// Runs entirely on classical factorials, independent of the theta kernels.
pub fn jackson_8phi7_residual(q5: &BalancedQuintuple, q: C64) -> Result<f64> {
    let (lhs, rhs) = jackson_8phi7_sides(q5, q)?;
    Ok(relative_residual(lhs, rhs))
}

/// Both sides of Jackson's summation: the terminating `_8φ_7` and its product.
pub fn jackson_8phi7_sides(q5: &BalancedQuintuple, q: C64) -> Result<(C64, C64)> {
    let (a, b, c, d, e) = (q5.a, q5.b, q5.c, q5.d, q5.e);
    let n = q5.n;
    let one = C64::new(1.0, 0.0);
    let qn = ipow(q, -(n as i64));
    let aq = a * q;
    let upper = [a, b, c, d, e, qn];
    let lower = [q, aq / b, aq / c, aq / d, aq / e, aq / qn];

    let mut acc = CompensatedSum::new();
    for k in 0..=n {
        let mut term = (one - a * ipow(q, 2 * k as i64)) / (one - a) * ipow(q, k as i64);
        for (&u, &l) in upper.iter().zip(lower.iter()) {
            let den = classical_fact(l, q, k);
            if den == C64::new(0.0, 0.0) {
                return Err(Error::PoleHit {
                    context: "Jackson 8phi7 lower factorial",
                    index: k as i64,
                });
            }
            term *= classical_fact(u, q, k) / den;
        }
        acc.add(term);
    }
    let lhs = acc.finish();
    let num: C64 = [aq, aq / (b * c), aq / (b * d), aq / (c * d)]
        .iter()
        .map(|&x| classical_fact(x, q, n))
        .product();
    let den: C64 = [aq / b, aq / c, aq / d, aq / (b * c * d)]
        .iter()
        .map(|&x| classical_fact(x, q, n))
        .product();
    if den == C64::new(0.0, 0.0) {
        return Err(Error::PoleHit {
            context: "Jackson 8phi7 closed form",
            index: n as i64,
        });
    }
    let rhs = num / den;
    if !lhs.is_finite() || !rhs.is_finite() {
        return Err(Error::NonFinite("jackson_8phi7_residual"));
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::c64;
    use crate::pochhammer::qp_fact;
    use proptest::prelude::*;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn pr() -> EllipticParams {
        EllipticParams::new(c64(0.86, 0.12), c64(0.78, -0.21)).unwrap()
    }

    fn quint(n: usize, params: &EllipticParams) -> BalancedQuintuple {
        BalancedQuintuple::solve(
            c64(0.7, 0.3),
            c64(1.2, -0.4),
            c64(-0.5, 0.8),
            c64(0.9, 0.6),
            n,
            params.q(),
        )
        .unwrap()
    }

    #[test]
    fn order_zero_is_one() {
        let params = pr();
        let q5 = quint(0, &params);
        let spec = q5.spec_10v9(&params).unwrap();
        assert_eq!(vwp_sum(&spec, &params, &pol()).unwrap(), c64(1.0, 0.0));
        assert_eq!(ft_rhs(&q5, &params, &pol()).unwrap(), c64(1.0, 0.0));
    }

    #[test]
    fn frenkel_turaev_at_fixed_points() {
        let params = pr();
        for n in 1..=6 {
            let q5 = quint(n, &params);
            let lhs = vwp_sum(&q5.spec_10v9(&params).unwrap(), &params, &pol()).unwrap();
            let rhs = ft_rhs(&q5, &params, &pol()).unwrap();
            assert!(relative_residual(lhs, rhs) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn matches_naive_term_oracle() {
        let params = pr();
        let q5 = quint(5, &params);
        let spec = q5.spec_10v9(&params).unwrap();
        let (q, p) = (params.q(), params.p());
        let a = spec.a1;
        // each term from scratch through qp_fact, summed naively
        let mut naive = c64(0.0, 0.0);
        for k in 0..=5i64 {
            let mut term = crate::theta::theta(a * ipow(q, 2 * k), p, &pol()).unwrap()
                / crate::theta::theta(a, p, &pol()).unwrap()
                * ipow(q, k);
            term *= qp_fact(a, k, &params, &pol()).unwrap() / qp_fact(q, k, &params, &pol()).unwrap();
            for &u in &spec.upper {
                term *= qp_fact(u, k, &params, &pol()).unwrap()
                    / qp_fact(a * q / u, k, &params, &pol()).unwrap();
            }
            naive += term;
        }
        let v = vwp_sum(&spec, &params, &pol()).unwrap();
        assert!(relative_residual(v, naive) < 1e-13);
    }

    #[test]
    fn nome_zero_reduces_to_jackson() {
        let params = EllipticParams::basic(c64(0.86, 0.12)).unwrap();
        let q5 = quint(4, &params);
        let lhs = vwp_sum(&q5.spec_10v9(&params).unwrap(), &params, &pol()).unwrap();
        let rhs = ft_rhs(&q5, &params, &pol()).unwrap();
        assert!(relative_residual(lhs, rhs) < 1e-12);
        assert!(jackson_8phi7_residual(&q5, params.q()).unwrap() < 1e-12);
    }

    #[test]
    fn jackson_examples() {
        let q = c64(0.55, 0.2);
        let mk = |n| BalancedQuintuple::solve(c64(0.7, 0.3), c64(1.2, -0.4), c64(-0.5, 0.8), c64(0.9, 0.6), n, q).unwrap();
        assert_eq!(jackson_8phi7_residual(&mk(0), q).unwrap(), 0.0);
        assert!(jackson_8phi7_residual(&mk(1), q).unwrap() < 1e-13);
        assert!(jackson_8phi7_residual(&mk(6), q).unwrap() < 1e-11);
    }

    #[test]
    fn balance_violation_is_rejected() {
        let params = pr();
        let mut q5 = quint(3, &params);
        q5.e *= c64(1.0 + 1e-3, 0.0);
        assert!(matches!(q5.spec_10v9(&params), Err(Error::BalanceViolation(_))));
    }

    #[test]
    fn bad_termination_is_rejected() {
        let params = pr();
        let q = params.q();
        let res = VwpSpec::new(c64(0.5, 0.0), vec![c64(0.3, 0.0), q], 1, &params);
        assert!(matches!(res, Err(Error::InvalidParameter(_))));
    }

    fn cplx(lo: f64, hi: f64) -> impl Strategy<Value = C64> {
        (lo.ln()..hi.ln(), 0.0..std::f64::consts::TAU).prop_map(|(r, ph)| C64::from_polar(r.exp(), ph))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn frenkel_turaev_random(a in cplx(0.3, 1.5), b in cplx(0.3, 1.5), c in cplx(0.3, 1.5), d in cplx(0.3, 1.5),
                                 t in cplx(0.2f64.powf(0.25), 0.8f64.powf(0.25)),
                                 s in cplx(0.05f64.powf(1.0 / 6.0), 0.5f64.powf(1.0 / 6.0)), n in 0usize..7) {
            let params = EllipticParams::new(t, s).unwrap();
            let q5 = BalancedQuintuple::solve(a, b, c, d, n, params.q()).unwrap();
            let spec = q5.spec_10v9(&params).unwrap();
            let ((l, r), kappa) = crate::sum::track_condition(|| (vwp_sum(&spec, &params, &pol()), ft_rhs(&q5, &params, &pol())));
            prop_assume!(kappa < crate::sum::CONDITION_LIMIT);
            if let (Ok(l), Ok(r)) = (l, r) {
                prop_assert!(relative_residual(l, r) < 1e-9, "residual {} at condition {}", relative_residual(l, r), kappa);
            }
        }
    }
}
