//! Elliptic Taylor coefficients and interpolation on `W_c^n`, their
//! multivariate versions, the quadratic basis, and the summation formulas
//! these expansions produce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    cooper_explicit, cooper_explicit_multi, MultiFunction, MultiIndex, SymmetricFunction,
};
use crate::params::{ipow, relative_residual, EllipticParams, TruncationPolicy, C64};
use crate::pochhammer::{qp_ratio_scaled, 
    qp_denominator, qp_denominator_base, qp_fact, qp_fact_base, qp_fact_multi, qp_ratio,
    qp_ratio_base,
};
use crate::series::{vwp_sum, VwpSpec};
use crate::sum::CompensatedSum;
use crate::theta::{theta, theta_divisor, theta_multi};

/// Relative reconstruction mismatch above which a function is declared outside `W_c^n`.
pub const DEGREE_OVERFLOW_THRESHOLD: f64 = 1e-6;

/// Deterministic probe points for the degree check, away from the unit circle and the real axis.
const PROBES: [C64; 8] = [
    C64 { re: 0.731, im: 0.412 },
    C64 { re: -0.583, im: 0.947 },
    C64 { re: 1.214, im: -0.338 },
    C64 { re: -0.402, im: -0.689 },
    C64 { re: 0.918, im: 1.071 },
    C64 { re: 0.267, im: -1.153 },
    C64 { re: -1.096, im: 0.218 },
    C64 { re: 0.644, im: 0.589 },
];
const PROBE_COUNT: usize = 5;

/// Which basis a coefficient vector refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `(az, a/z;q,p)_k / (cz, c/z;q,p)_k`.
    WellPoised,
    /// `(q^{1/4}z, q^{1/4}/z;q^{1/2},p)_k / (cz, c/z;q,p)_k`.
    Quadratic,
}

/// Coefficients of an element of `W_c^n` in one of the two bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoefficients {
    pub f_k: Vec<C64>,
    /// Basis parameter; `q^{1/4}` for the quadratic basis.
    pub a: C64,
    pub c: C64,
    pub n: usize,
    pub basis: Basis,
}

impl TaylorCoefficients {
    /// `Σ f_k · basis_k(z)`.
    pub fn reconstruct(&self, z: C64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
        let mut acc = CompensatedSum::new();
        for (k, &fk) in self.f_k.iter().enumerate() {
            let b = match self.basis {
                Basis::WellPoised => wp_value(self.a, self.c, k, z, params, policy)?,
                Basis::Quadratic => quadratic_basis_value(self.c, k, z, params, policy)?,
            };
            acc.add(fk * b);
        }
        Ok(acc.finish())
    }
}

fn wp_value(a: C64, c: C64, k: usize, z: C64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    qp_ratio(&[a * z, a / z], &[c * z, c / z], k as i64, params, policy, "basis denominator")
}

/// `(q^{1/4}z, q^{1/4}/z;q^{1/2},p)_k / (cz, c/z;q,p)_k`.
pub fn quadratic_basis_value(
    c: C64,
    k: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let t = params.t;
    let p = params.p();
    let h = params.q_half();
    let ki = k as i64;
    let num = qp_fact_base(t * z, h, ki, p, policy)? * qp_fact_base(t / z, h, ki, p, policy)?;
    let den = qp_denominator(&[c * z, c / z], ki, params, policy, "quadratic basis denominator")?;
    Ok(num / den)
}

/// The quadratic basis element as a function.
pub fn quadratic_basis(c: C64, k: usize, params: &EllipticParams, policy: &TruncationPolicy) -> SymmetricFunction {
    let (params, policy) = (*params, *policy);
    SymmetricFunction::new(move |z| quadratic_basis_value(c, k, z, &params, &policy))
}

/// Compares a reconstruction with `f` at deterministic probes; `DegreeOverflow` on mismatch.
fn check_degree<F>(f: &SymmetricFunction, reconstruct: F) -> Result<()>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut used = 0;
    let mut worst = 0.0f64;
    for &z in PROBES.iter() {
        if used == PROBE_COUNT {
            break;
        }
        let (Ok(fz), Ok(rz)) = (f.eval(z), reconstruct(z)) else {
            continue;
        };
        if !fz.is_finite() || !rz.is_finite() {
            continue;
        }
        worst = worst.max(relative_residual(fz, rz));
        used += 1;
    }
    if used == 0 {
        return Err(Error::NonFinite("degree probe"));
    }
    if worst > DEGREE_OVERFLOW_THRESHOLD {
        return Err(Error::DegreeOverflow {
            mismatch: worst,
            threshold: DEGREE_OVERFLOW_THRESHOLD,
        });
    }
    Ok(())
}

/// One Taylor coefficient
/// `f_k = (-1)^k q^{-k(k-1)/4} θ(q)^k / ((2a)^k (q, c/a, acq^{k-1})_k) · D^{(k)} f(a q^{k/2})`.
pub fn taylor_coefficient(
    f: &SymmetricFunction,
    a: C64,
    c: C64,
    k: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let ki = k as i64;
    let p = params.p();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let th_q = theta(params.q(), p, policy)?;
    let den = ipow(C64::new(2.0, 0.0) * a, ki)
        * qp_denominator(
            &[params.q(), c / a, a * c * params.q_pow(ki - 1)],
            ki,
            params,
            policy,
            "Taylor coefficient",
        )?;
    let dk = cooper_explicit(f, c, k, a * params.q_pow_half(ki), params, policy)?;
    Ok(sign * params.q_pow_quarter(-ki * (ki - 1)) * ipow(th_q, ki) / den * dk)
}

/// Taylor coefficients of `f ∈ W_c^n` in the basis `(az, a/z)_k/(cz, c/z)_k`.
///
/// After the `n+1` coefficients are computed the reconstruction is compared
/// with `f` at five probe points; a mismatch above
/// [`DEGREE_OVERFLOW_THRESHOLD`] means `f ∉ W_c^n`.
pub fn taylor_coeffs(
    f: &SymmetricFunction,
    a: C64,
    c: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<TaylorCoefficients> {
    let f_k = (0..=n)
        .map(|k| taylor_coefficient(f, a, c, k, params, policy))
        .collect::<Result<Vec<_>>>()?;
    let out = TaylorCoefficients {
        f_k,
        a,
        c,
        n,
        basis: Basis::WellPoised,
    };
    check_degree(f, |z| out.reconstruct(z, params, policy))?;
    Ok(out)
}

/// Coefficients in the quadratic basis:
/// `f_k = (-1)^k q^{-k/4} θ(q)^k / (2^k (q)_k (cq^{k/2-3/4};q^{1/2})_{2k}) · D^{(k)} f(q^{1/4})`.
pub fn quadratic_taylor_coeffs(
    f: &SymmetricFunction,
    c: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<TaylorCoefficients> {
    let t = params.t;
    let p = params.p();
    let th_q = theta(params.q(), p, policy)?;
    let mut f_k = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let ki = k as i64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let den = ipow(C64::new(2.0, 0.0), ki)
            * qp_denominator(&[params.q()], ki, params, policy, "quadratic Taylor coefficient")?
            * qp_denominator_base(
                &[c * params.q_pow_quarter(2 * ki - 3)],
                params.q_half(),
                2 * ki,
                p,
                policy,
                "quadratic Taylor coefficient",
            )?;
        let dk = cooper_explicit(f, c, k, t, params, policy)?;
        f_k.push(sign * params.q_pow_quarter(-ki) * ipow(th_q, ki) / den * dk);
    }
    let out = TaylorCoefficients {
        f_k,
        a: t,
        c,
        n,
        basis: Basis::Quadratic,
    };
    check_degree(f, |z| out.reconstruct(z, params, policy))?;
    Ok(out)
}

/// Interpolation prefactor `(a²q, q, cz, c/z)_n / (ac, c/a, aqz, aq/z)_n`.
pub fn interpolation_prefactor(
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let q = params.q();
    qp_ratio(
        &[a * a * q, q, c * z, c / z],
        &[a * c, c / a, a * q * z, a * q / z],
        n as i64,
        params,
        policy,
        "interpolation prefactor",
    )
}

/// Node weight of the interpolation formula at index `k`:
/// `q^k θ(a²q^{2k})/θ(a²) (q^{-n}, a², aq/c, acq^n, az, a/z)_k / (q, a²q^{n+1}, ac, aq^{1-n}/c, aqz, aq/z)_k`.
pub fn interpolation_weight(
    a: C64,
    c: C64,
    n: usize,
    k: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let (ni, ki) = (n as i64, k as i64);
    let q = params.q();
    let p = params.p();
    let a2 = a * a;
    let wp = theta(a2 * params.q_pow(2 * ki), p, policy)?
        / theta_divisor(a2, p, policy, "interpolation: theta(a^2)", 0)?;
    let r = qp_ratio(
        &[params.q_pow(-ni), a2, a * q / c, a * c * params.q_pow(ni), a * z, a / z],
        &[q, a2 * params.q_pow(ni + 1), a * c, a * params.q_pow(1 - ni) / c, a * q * z, a * q / z],
        ki,
        params,
        policy,
        "interpolation weight",
    )?;
    Ok(params.q_pow(ki) * wp * r)
}

/// The interpolation sum `Σ_k w_k(z) f(aq^k)`; equals the prefactor times `f(z)` for `f ∈ W_c^n`.
pub fn interpolate(
    f: &SymmetricFunction,
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let mut acc = CompensatedSum::new();
    for k in 0..=n {
        let node = f.eval(a * params.q_pow(k as i64))?;
        acc.add(interpolation_weight(a, c, n, k, z, params, policy)? * node);
    }
    Ok(acc.finish())
}

/// Closed-form Taylor coefficients of `(bz, b/z)_n/(cz, c/z)_n` in the basis at `a`:
/// `(ab, b/a)_n/(ac, c/a)_n θ(acq^{2k-1})/θ(ac/q) (ac/q, c/b, bcq^{n-1}, q^{-n})_k / (q, ab, aq^{1-n}/b, acq^n)_k q^k`.
pub fn wp_expansion_coefficient(
    a: C64,
    b: C64,
    c: C64,
    n: usize,
    k: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let (ni, ki) = (n as i64, k as i64);
    let q = params.q();
    let p = params.p();
    let lead = qp_ratio(&[a * b, b / a], &[a * c, c / a], ni, params, policy, "expansion coefficient")?;
    let ac = a * c;
    let wp = theta(ac * params.q_pow(2 * ki - 1), p, policy)?
        / theta_divisor(ac / q, p, policy, "expansion coefficient", 0)?;
    let r = qp_ratio(
        &[ac / q, c / b, b * c * params.q_pow(ni - 1), params.q_pow(-ni)],
        &[q, a * b, a * params.q_pow(1 - ni) / b, ac * params.q_pow(ni)],
        ki,
        params,
        policy,
        "expansion coefficient",
    )?;
    Ok(lead * wp * r * params.q_pow(ki))
}

// ---------------------------------------------------------------------------
// Karlsson–Minton type summations in one variable

/// Left side of the `_{12}V_{11}` Karlsson–Minton identity:
/// `(q, a²q)_n/(aqz, aq/z)_n · (bz, b/z)_s (dz, d/z)_{n-s} / ((ab, b/a)_s (ad, d/a)_{n-s})`.
#[allow(clippy::too_many_arguments)]
pub fn km_12v11_lhs(
    a: C64,
    b: C64,
    d: C64,
    n: usize,
    s: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    if s > n {
        return Err(Error::InvalidParameter(format!("need s <= n, got s={s}, n={n}")));
    }
    let q = params.q();
    let (ni, si) = (n as i64, s as i64);
    Ok(qp_ratio(&[q, a * a * q], &[a * q * z, a * q / z], ni, params, policy, "Karlsson-Minton")?
        * qp_ratio(&[b * z, b / z], &[a * b, b / a], si, params, policy, "Karlsson-Minton")?
        * qp_ratio(&[d * z, d / z], &[a * d, d / a], ni - si, params, policy, "Karlsson-Minton")?)
}

/// Right side: `_{12}V_{11}(a²; az, a/z, aq/b, aq/d, abq^s, adq^{n-s}, q^{-n})`.
#[allow(clippy::too_many_arguments)]
pub fn km_12v11_rhs(
    a: C64,
    b: C64,
    d: C64,
    n: usize,
    s: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let q = params.q();
    let (ni, si) = (n as i64, s as i64);
    let spec = VwpSpec::new(
        a * a,
        vec![
            a * z,
            a / z,
            a * q / b,
            a * q / d,
            a * b * params.q_pow(si),
            a * d * params.q_pow(ni - si),
            params.q_pow(-ni),
        ],
        n,
        params,
    )?;
    vwp_sum(&spec, params, policy)
}

/// Left side of the theta-product Karlsson–Minton identity:
/// `(a²q, q)_n/(aqz, aq/z)_n ∏_j θ(b_j z, b_j/z)`, with `n = b.len()`.
pub fn km_theta_lhs(a: C64, b: &[C64], z: C64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    let q = params.q();
    let n = b.len() as i64;
    let mut v = qp_ratio(&[a * a * q, q], &[a * q * z, a * q / z], n, params, policy, "Karlsson-Minton")?;
    for &bj in b {
        v *= theta_multi(&[bj * z, bj / z], params.p(), policy)?;
    }
    Ok(v)
}

/// Right side,
/// `Σ_k q^{k(n+1)} θ(a²q^{2k})/θ(a²) (q^{-n}, a², az, a/z)_k/(q, a²q^{n+1}, aqz, aq/z)_k ∏_j θ(a b_j q^k, b_j q^{-k}/a)`.
///
/// `literal_index = true` evaluates the product with `b_k` in the first slot
/// (as the formula is sometimes printed); that reading does not hold and is
/// only kept to document the discrepancy.
pub fn km_theta_rhs(
    a: C64,
    b: &[C64],
    z: C64,
    literal_index: bool,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let q = params.q();
    let p = params.p();
    let n = b.len();
    let ni = n as i64;
    let a2 = a * a;
    let th_a2 = theta_divisor(a2, p, policy, "Karlsson-Minton: theta(a^2)", 0)?;
    let mut acc = CompensatedSum::new();
    for k in 0..=n {
        let ki = k as i64;
        // the factorial ratio and the theta products can sit near opposite ends of the f64 range
        let mut term = qp_ratio_scaled(
            &[params.q_pow(-ni), a2, a * z, a / z],
            &[q, a2 * params.q_pow(ni + 1), a * q * z, a * q / z],
            ki,
            params,
            policy,
            "Karlsson-Minton",
        )? * (params.q_pow(ki * (ni + 1)) * theta(a2 * params.q_pow(2 * ki), p, policy)? / th_a2);
        let qk = params.q_pow(ki);
        for &bj in b {
            let first = if literal_index && k >= 1 { b[k - 1] } else { bj };
            term = term * theta(a * first * qk, p, policy)? * theta(bj / (qk * a), p, policy)?;
        }
        acc.add(term.value());
    }
    Ok(acc.finish())
}

// ---------------------------------------------------------------------------
// Quadratic basis consequences

/// Left side of the quadratic summation obtained by expanding `(az, a/z)_n/(cz, c/z)_n`
/// in the quadratic basis: `(az, a/z)_n/(cz, c/z)_n · (cq^{-1/4};q^{1/2})_{2n} / (aq^{-1/4};q^{1/2})_{2n}`.
pub fn quadratic_summation_lhs(
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let t = params.t;
    let ni = n as i64;
    let h = params.q_half();
    let p = params.p();
    Ok(wp_value(a, c, n, z, params, policy)?
        * qp_ratio_base(&[c / t], &[a / t], h, 2 * ni, p, policy, "quadratic summation")?)
}

/// Right side:
/// `Σ_k q^{k/2} θ(cq^{3k/2-3/4})/θ(cq^{-3/4}) (c/a, acq^{n-1}, q^{-n})_k/(cz, c/z, q)_k
///  · (cq^{-3/4}, q^{1/4}z, q^{1/4}/z;q^{1/2})_k / (aq^{-1/4}, cq^{n-1/4}, q^{3/4-n}/a;q^{1/2})_k`.
pub fn quadratic_summation_rhs(
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let t = params.t;
    let tp = |e: i64| params.q_pow_quarter(e);
    let q = params.q();
    let h = params.q_half();
    let p = params.p();
    let ni = n as i64;
    let th0 = theta_divisor(c * tp(-3), p, policy, "quadratic summation", 0)?;
    let mut acc = CompensatedSum::new();
    for k in 0..=ni {
        let term = tp(2 * k) * theta(c * tp(6 * k - 3), p, policy)? / th0
            * qp_ratio(
                &[c / a, a * c * params.q_pow(ni - 1), params.q_pow(-ni)],
                &[c * z, c / z, q],
                k,
                params,
                policy,
                "quadratic summation",
            )?
            * qp_ratio_base(
                &[c * tp(-3), t * z, t / z],
                &[a / t, c * tp(4 * ni - 1), tp(3 - 4 * ni) / a],
                h,
                k,
                p,
                policy,
                "quadratic summation",
            )?;
        acc.add(term);
    }
    Ok(acc.finish())
}

/// Left side of the pseudo-quadratic identity (quadratic basis element expanded in the
/// well-poised basis): `(q^{1/4}z, q^{1/4}/z;q^{1/2})_n/(aq^{1/4}, q^{1/4}/a;q^{1/2})_n · (ac, c/a)_n/(cz, c/z)_n`.
pub fn pseudo_quadratic_lhs(
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let t = params.t;
    let ni = n as i64;
    let h = params.q_half();
    let p = params.p();
    Ok(qp_ratio_base(&[t * z, t / z], &[a * t, t / a], h, ni, p, policy, "pseudo-quadratic")?
        * qp_ratio(&[a * c, c / a], &[c * z, c / z], ni, params, policy, "pseudo-quadratic")?)
}

/// The `_{10}V_9` side: `_{10}V_9(ac/q; az, a/z, cq^{n/2-3/4}, cq^{n/2-1/4}, q^{-n})`.
pub fn pseudo_quadratic_series(
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let tp = |e: i64| params.q_pow_quarter(e);
    let ni = n as i64;
    let spec = VwpSpec::new(
        a * c / params.q(),
        vec![a * z, a / z, c * tp(2 * ni - 3), c * tp(2 * ni - 1), params.q_pow(-ni)],
        n,
        params,
    )?;
    vwp_sum(&spec, params, policy)
}

/// Frenkel–Turaev evaluation of the series:
/// `(ac, c/a, q^{3/4-n/2}z, q^{3/4-n/2}/z)_n / (cz, c/z, aq^{3/4-n/2}, q^{3/4-n/2}/a)_n`.
pub fn pseudo_quadratic_closed_form(
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let ni = n as i64;
    let u = params.q_pow_quarter(3 - 2 * ni);
    qp_ratio(
        &[a * c, c / a, u * z, u / z],
        &[c * z, c / z, a * u, u / a],
        ni,
        params,
        policy,
        "pseudo-quadratic closed form",
    )
}

// ---------------------------------------------------------------------------
// Several variables

/// Per-variable basis data `a_i, c_i, n_i` of `W_{c}^{n}` in `m` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultivarConfig {
    pub a: Vec<C64>,
    pub c: Vec<C64>,
    pub n: Vec<usize>,
}

impl MultivarConfig {
    pub fn new(a: Vec<C64>, c: Vec<C64>, n: Vec<usize>) -> Result<Self> {
        if a.is_empty() || a.len() != c.len() || a.len() != n.len() {
            return Err(Error::InvalidParameter(
                "multivariate config needs equal, nonzero lengths".into(),
            ));
        }
        Ok(Self { a, c, n })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }
}

/// Coefficients `f_{k_1…k_m}` stored with the first index fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTensor {
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

impl CoefficientTensor {
    pub fn offset(&self, k: &[usize]) -> usize {
        let mut off = 0;
        let mut stride = 1;
        for (ki, &d) in k.iter().zip(&self.dims) {
            off += ki * stride;
            stride *= d;
        }
        off
    }

    pub fn get(&self, k: &[usize]) -> C64 {
        self.data[self.offset(k)]
    }
}

/// Multivariate Taylor coefficients, one explicit multivariate iterate per index.
pub fn taylor_coeffs_multi(
    f: &MultiFunction,
    cfg: &MultivarConfig,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<CoefficientTensor> {
    if f.arity() != cfg.m() {
        return Err(Error::InvalidParameter("function arity does not match the config".into()));
    }
    let p = params.p();
    let th_q = theta(params.q(), p, policy)?;
    let dims: Vec<usize> = cfg.n.iter().map(|n| n + 1).collect();
    let mut data = Vec::with_capacity(dims.iter().product());
    for k in MultiIndex::new(&cfg.n) {
        let mut scale = C64::new(1.0, 0.0);
        let mut point = Vec::with_capacity(cfg.m());
        for (i, &ki) in k.iter().enumerate() {
            let ki = ki as i64;
            let (a, c) = (cfg.a[i], cfg.c[i]);
            let sign = if ki % 2 == 0 { 1.0 } else { -1.0 };
            scale *= sign * params.q_pow_quarter(-ki * (ki - 1)) * ipow(th_q, ki)
                / (ipow(C64::new(2.0, 0.0) * a, ki)
                    * qp_denominator(
                        &[params.q(), c / a, a * c * params.q_pow(ki - 1)],
                        ki,
                        params,
                        policy,
                        "multivariate Taylor coefficient",
                    )?);
            point.push(a * params.q_pow_half(ki));
        }
        data.push(scale * cooper_explicit_multi(f, &cfg.c, &k, &point, params, policy)?);
    }
    let out = CoefficientTensor { dims, data };
    // membership probe along a fixed diagonal of probe points
    let mut worst = 0.0f64;
    for shift in 0..3 {
        let z: Vec<C64> = (0..cfg.m()).map(|i| PROBES[(i + 2 * shift) % PROBES.len()]).collect();
        let (Ok(fz), Ok(rz)) = (f.eval(&z), reconstruct_multi(&out, cfg, &z, params, policy)) else {
            continue;
        };
        worst = worst.max(relative_residual(fz, rz));
    }
    if worst > DEGREE_OVERFLOW_THRESHOLD {
        return Err(Error::DegreeOverflow {
            mismatch: worst,
            threshold: DEGREE_OVERFLOW_THRESHOLD,
        });
    }
    Ok(out)
}

/// `Σ_k f_k ∏_i (a_i z_i, a_i/z_i)_{k_i}/(c_i z_i, c_i/z_i)_{k_i}`.
pub fn reconstruct_multi(
    coeffs: &CoefficientTensor,
    cfg: &MultivarConfig,
    z: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let basis: Vec<Vec<C64>> = (0..cfg.m())
        .map(|i| {
            (0..=cfg.n[i])
                .map(|k| wp_value(cfg.a[i], cfg.c[i], k, z[i], params, policy))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut acc = CompensatedSum::new();
    for k in MultiIndex::new(&cfg.n) {
        let b: C64 = k.iter().enumerate().map(|(i, &ki)| basis[i][ki]).product();
        acc.add(coeffs.get(&k) * b);
    }
    Ok(acc.finish())
}

/// `∏_i` of the one-variable interpolation prefactors.
pub fn interpolation_prefactor_multi(
    cfg: &MultivarConfig,
    z: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    (0..cfg.m()).try_fold(C64::new(1.0, 0.0), |acc, i| {
        Ok(acc * interpolation_prefactor(cfg.a[i], cfg.c[i], cfg.n[i], z[i], params, policy)?)
    })
}

/// Multivariate interpolation sum over the nodes `(a_1 q^{k_1}, …, a_m q^{k_m})`.
pub fn interpolate_multi(
    f: &MultiFunction,
    cfg: &MultivarConfig,
    z: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    if f.arity() != cfg.m() || z.len() != cfg.m() {
        return Err(Error::InvalidParameter("arity mismatch in multivariate interpolation".into()));
    }
    let weights: Vec<Vec<C64>> = (0..cfg.m())
        .map(|i| {
            (0..=cfg.n[i])
                .map(|k| interpolation_weight(cfg.a[i], cfg.c[i], cfg.n[i], k, z[i], params, policy))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut acc = CompensatedSum::new();
    let mut node = vec![C64::new(0.0, 0.0); cfg.m()];
    for k in MultiIndex::new(&cfg.n) {
        let mut w = C64::new(1.0, 0.0);
        for (i, &ki) in k.iter().enumerate() {
            w *= weights[i][ki];
            node[i] = cfg.a[i] * params.q_pow(ki as i64);
        }
        acc.add(w * f.eval(&node)?);
    }
    Ok(acc.finish())
}

/// One cross factor between variables `i < j`: the factorial block
/// `(α z_i z_j, α z_i/z_j, α z_j/z_i, α/(z_i z_j);q,p)_u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFactor {
    pub i: usize,
    pub j: usize,
    pub alpha: C64,
    pub u: usize,
}

/// Shape and parameters of the multivariate Karlsson–Minton identity.
///
/// `b[i][l]` with exponent `v[i][l]` are the one-variable factors of `z_i`;
/// `w[(i, j)]` the powers of `z_i^{-1} θ(z_i z_j, z_i/z_j)`; `pairs` the
/// `α`-blocks. The degrees `n_i` are not free: they are solved from the shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KarlssonMintonConfig {
    pub m: usize,
    pub b: Vec<Vec<C64>>,
    pub v: Vec<Vec<usize>>,
    /// Entries `(i, j, w_ij)` with `i < j`.
    pub w: Vec<(usize, usize, usize)>,
    pub pairs: Vec<PairFactor>,
}

impl KarlssonMintonConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.b.len() != self.m || self.v.len() != self.m {
            return Err(Error::InvalidParameter("Karlsson-Minton config: bad variable count".into()));
        }
        for (bi, vi) in self.b.iter().zip(&self.v) {
            if bi.len() != vi.len() {
                return Err(Error::InvalidParameter("Karlsson-Minton config: b/v length mismatch".into()));
            }
        }
        let pair_ok = |i: usize, j: usize| i < j && j < self.m;
        if !self.w.iter().all(|&(i, j, _)| pair_ok(i, j)) || !self.pairs.iter().all(|pf| pair_ok(pf.i, pf.j)) {
            return Err(Error::InvalidParameter("Karlsson-Minton config: pairs need i < j < m".into()));
        }
        Ok(())
    }

    /// `n_i = Σ_l v_il + Σ_{pairs ∋ i} w + 2 Σ_{α-blocks ∋ i} u`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut n: Vec<usize> = self.v.iter().map(|vi| vi.iter().sum()).collect();
        for &(i, j, w) in &self.w {
            n[i] += w;
            n[j] += w;
        }
        for pf in &self.pairs {
            n[pf.i] += 2 * pf.u;
            n[pf.j] += 2 * pf.u;
        }
        n
    }

    /// True when every `v_il` and `u` equals 1 (the theta-product form).
    pub fn is_theta_form(&self) -> bool {
        self.v.iter().flatten().all(|&v| v == 1) && self.pairs.iter().all(|pf| pf.u == 1)
    }
}

/// Exponent convention for the `q`-powers attached to the pair factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairPower {
    /// `q^{2u k_j}` and `q^{w k_j}`, the form that follows from the interpolation formula.
    Derived,
    /// `q^{-2u k_i}` and `q^{-w k_i}`, as sometimes printed; kept to document that it fails.
    Printed,
}

fn km_common_lhs(
    cfg: &KarlssonMintonConfig,
    a: &[C64],
    z: &[C64],
    n: &[usize],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let q = params.q();
    let p = params.p();
    let mut v = C64::new(1.0, 0.0);
    for i in 0..cfg.m {
        v *= qp_ratio(
            &[a[i] * a[i] * q, q],
            &[a[i] * q * z[i], a[i] * q / z[i]],
            n[i] as i64,
            params,
            policy,
            "multivariate Karlsson-Minton",
        )?;
    }
    for &(i, j, w) in &cfg.w {
        let th = theta_multi(&[z[i] * z[j], z[i] / z[j]], p, policy)?;
        v *= ipow(a[i] / z[i] * th, w as i64);
    }
    Ok(v)
}

fn km_check(cfg: &KarlssonMintonConfig, a: &[C64], z: &[C64]) -> Result<Vec<usize>> {
    cfg.validate()?;
    if a.len() != cfg.m || z.len() != cfg.m {
        return Err(Error::InvalidParameter("Karlsson-Minton: a and z need m entries".into()));
    }
    Ok(cfg.degrees())
}

/// Left side of the multivariate Karlsson–Minton identity (shifted-factorial form).
pub fn km_multi_lhs(
    cfg: &KarlssonMintonConfig,
    a: &[C64],
    z: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = km_check(cfg, a, z)?;
    let mut v = km_common_lhs(cfg, a, z, &n, params, policy)?;
    for i in 0..cfg.m {
        for (&b, &vv) in cfg.b[i].iter().zip(&cfg.v[i]) {
            v *= qp_ratio(&[b * z[i], b / z[i]], &[b * a[i], b / a[i]], vv as i64, params, policy, "multivariate Karlsson-Minton")?;
        }
    }
    for pf in &cfg.pairs {
        let (zi, zj, ai, aj, al) = (z[pf.i], z[pf.j], a[pf.i], a[pf.j], pf.alpha);
        v *= qp_ratio(
            &[al * zi * zj, al * zi / zj, al * zj / zi, al / (zi * zj)],
            &[al * ai * aj, al * ai / aj, al * aj / ai, al / (ai * aj)],
            pf.u as i64,
            params,
            policy,
            "multivariate Karlsson-Minton",
        )?;
    }
    Ok(v)
}

/// Per-variable factor of a summand shared by both multivariate forms.
fn km_variable_term(
    ai: C64,
    zi: C64,
    ni: usize,
    ki: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let (ni, ki) = (ni as i64, ki as i64);
    let q = params.q();
    let p = params.p();
    let a2 = ai * ai;
    Ok(params.q_pow(ki) * theta(a2 * params.q_pow(2 * ki), p, policy)?
        / theta_divisor(a2, p, policy, "multivariate Karlsson-Minton", 0)?
        * qp_ratio(
            &[params.q_pow(-ni), a2, ai * zi, ai / zi],
            &[q, a2 * params.q_pow(ni + 1), ai * q * zi, ai * q / zi],
            ki,
            params,
            policy,
            "multivariate Karlsson-Minton",
        )?)
}

fn km_w_term(
    cfg: &KarlssonMintonConfig,
    a: &[C64],
    k: &[usize],
    power: PairPower,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let p = params.p();
    let mut v = C64::new(1.0, 0.0);
    for &(i, j, w) in &cfg.w {
        let (ki, kj) = (k[i] as i64, k[j] as i64);
        let e = match power {
            PairPower::Derived => w as i64 * kj,
            PairPower::Printed => -(w as i64) * ki,
        };
        let th = theta_multi(
            &[a[i] * a[j] * params.q_pow(ki + kj), a[i] * params.q_pow(ki - kj) / a[j]],
            p,
            policy,
        )?;
        v *= params.q_pow(e) * ipow(th, w as i64);
    }
    Ok(v)
}

/// Right side of the multivariate Karlsson–Minton identity (shifted-factorial form).
pub fn km_multi_rhs(
    cfg: &KarlssonMintonConfig,
    a: &[C64],
    z: &[C64],
    power: PairPower,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = km_check(cfg, a, z)?;
    let q = params.q();
    let mut acc = CompensatedSum::new();
    for k in MultiIndex::new(&n) {
        let mut term = C64::new(1.0, 0.0);
        for i in 0..cfg.m {
            let ki = k[i] as i64;
            term *= km_variable_term(a[i], z[i], n[i], k[i], params, policy)?;
            for (&b, &vv) in cfg.b[i].iter().zip(&cfg.v[i]) {
                let vv = vv as i64;
                term *= qp_ratio(
                    &[a[i] * b * params.q_pow(vv), a[i] * q / b],
                    &[a[i] * b, a[i] * params.q_pow(1 - vv) / b],
                    ki,
                    params,
                    policy,
                    "multivariate Karlsson-Minton",
                )?;
            }
        }
        for pf in &cfg.pairs {
            let (ki, kj) = (k[pf.i] as i64, k[pf.j] as i64);
            let (ai, aj, al, u) = (a[pf.i], a[pf.j], pf.alpha, pf.u as i64);
            let e = match power {
                PairPower::Derived => 2 * u * kj,
                PairPower::Printed => -2 * u * ki,
            };
            term *= params.q_pow(e)
                * qp_ratio(
                    &[al * ai * aj * params.q_pow(u), q * ai * aj / al],
                    &[al * ai * aj, params.q_pow(1 - u) * ai * aj / al],
                    ki + kj,
                    params,
                    policy,
                    "multivariate Karlsson-Minton",
                )?
                * qp_ratio(
                    &[al * ai * params.q_pow(u) / aj, q * ai / (aj * al)],
                    &[al * ai / aj, params.q_pow(1 - u) * ai / (aj * al)],
                    ki - kj,
                    params,
                    policy,
                    "multivariate Karlsson-Minton",
                )?;
        }
        term *= km_w_term(cfg, a, &k, power, params, policy)?;
        acc.add(term);
    }
    Ok(acc.finish())
}

fn require_theta_form(cfg: &KarlssonMintonConfig) -> Result<()> {
    if !cfg.is_theta_form() {
        return Err(Error::InvalidParameter(
            "theta-product form needs every v and u equal to 1".into(),
        ));
    }
    Ok(())
}

/// Left side of the theta-product restatement (every `v`, `u` equal to 1).
pub fn km_multi_theta_lhs(
    cfg: &KarlssonMintonConfig,
    a: &[C64],
    z: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    require_theta_form(cfg)?;
    let n = km_check(cfg, a, z)?;
    let p = params.p();
    let mut v = km_common_lhs(cfg, a, z, &n, params, policy)?;
    for i in 0..cfg.m {
        for &b in &cfg.b[i] {
            v *= theta_multi(&[b * z[i], b / z[i]], p, policy)?
                / (theta_divisor(b * a[i], p, policy, "theta-form Karlsson-Minton", 0)?
                    * theta_divisor(b / a[i], p, policy, "theta-form Karlsson-Minton", 0)?);
        }
    }
    for pf in &cfg.pairs {
        let (zi, zj, ai, aj, al) = (z[pf.i], z[pf.j], a[pf.i], a[pf.j], pf.alpha);
        let num = theta_multi(&[al * zi * zj, al * zi / zj, al * zj / zi, al / (zi * zj)], p, policy)?;
        let mut den = C64::new(1.0, 0.0);
        for x in [al * ai * aj, al * ai / aj, al * aj / ai, al / (ai * aj)] {
            den *= theta_divisor(x, p, policy, "theta-form Karlsson-Minton", 0)?;
        }
        v *= num / den;
    }
    Ok(v)
}

/// Right side of the theta-product restatement.
pub fn km_multi_theta_rhs(
    cfg: &KarlssonMintonConfig,
    a: &[C64],
    z: &[C64],
    power: PairPower,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    require_theta_form(cfg)?;
    let n = km_check(cfg, a, z)?;
    let p = params.p();
    let mut acc = CompensatedSum::new();
    for k in MultiIndex::new(&n) {
        let mut term = C64::new(1.0, 0.0);
        for i in 0..cfg.m {
            let qk = params.q_pow(k[i] as i64);
            term *= km_variable_term(a[i], z[i], n[i], k[i], params, policy)?;
            for &b in &cfg.b[i] {
                term *= theta_multi(&[a[i] * b * qk, a[i] * qk / b], p, policy)?
                    / (theta_divisor(a[i] * b, p, policy, "theta-form Karlsson-Minton", 0)?
                        * theta_divisor(a[i] / b, p, policy, "theta-form Karlsson-Minton", 0)?);
            }
        }
        for pf in &cfg.pairs {
            let (ki, kj) = (k[pf.i] as i64, k[pf.j] as i64);
            let (ai, aj, al) = (a[pf.i], a[pf.j], pf.alpha);
            let e = match power {
                PairPower::Derived => 2 * kj,
                PairPower::Printed => -2 * ki,
            };
            let (qs, qd) = (params.q_pow(ki + kj), params.q_pow(ki - kj));
            let num = theta_multi(
                &[al * ai * aj * qs, qs * ai * aj / al, al * ai * qd / aj, qd * ai / (aj * al)],
                p,
                policy,
            )?;
            let mut den = C64::new(1.0, 0.0);
            for x in [al * ai * aj, ai * aj / al, al * ai / aj, ai / (aj * al)] {
                den *= theta_divisor(x, p, policy, "theta-form Karlsson-Minton", 0)?;
            }
            term *= params.q_pow(e) * num / den;
        }
        term *= km_w_term(cfg, a, &k, power, params, policy)?;
        acc.add(term);
    }
    Ok(acc.finish())
}

/// The function the multivariate Karlsson–Minton identity interpolates:
/// `∏_i ∏_l (b_il z_i, b_il/z_i)_{v_il} / (c_i z_i, c_i/z_i)_{n_i} · ∏ z_i^{-w} θ(z_i z_j, z_i/z_j)^w · ∏ α-blocks`.
pub fn km_multi_function(
    cfg: &KarlssonMintonConfig,
    c: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<MultiFunction> {
    cfg.validate()?;
    if c.len() != cfg.m {
        return Err(Error::InvalidParameter("Karlsson-Minton: c needs m entries".into()));
    }
    let n = cfg.degrees();
    let (cfg, c, params, policy) = (cfg.clone(), c.to_vec(), *params, *policy);
    Ok(MultiFunction::new(cfg.m, move |z| {
        let p = params.p();
        let mut v = C64::new(1.0, 0.0);
        for i in 0..cfg.m {
            let mut num = C64::new(1.0, 0.0);
            for (&b, &vv) in cfg.b[i].iter().zip(&cfg.v[i]) {
                num *= qp_fact_multi(&[b * z[i], b / z[i]], vv as i64, &params, &policy)?;
            }
            v *= num / qp_denominator(&[c[i] * z[i], c[i] / z[i]], n[i] as i64, &params, &policy, "Karlsson-Minton function")?;
        }
        for &(i, j, w) in &cfg.w {
            v *= ipow(theta_multi(&[z[i] * z[j], z[i] / z[j]], p, &policy)? / z[i], w as i64);
        }
        for pf in &cfg.pairs {
            let (zi, zj, al) = (z[pf.i], z[pf.j], pf.alpha);
            v *= qp_fact_multi(&[al * zi * zj, al * zi / zj, al * zj / zi, al / (zi * zj)], pf.u as i64, &params, &policy)?;
        }
        Ok(v)
    }))
}

/// `(q;q,p)_n`, re-exported for callers that assemble normalisations by hand.
pub fn q_fact(n: usize, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    qp_fact(params.q(), n as i64, params, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{wp_basis, WcnElement};
    use crate::params::c64;
    use crate::series::{ft_rhs, BalancedQuintuple};

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn pr() -> EllipticParams {
        EllipticParams::new(c64(0.86, 0.14), c64(0.77, 0.2)).unwrap()
    }

    const Z: C64 = C64 { re: 0.93, im: -0.41 };
    const A: C64 = C64 { re: 0.58, im: 0.47 };
    const C: C64 = C64 { re: -0.81, im: 0.36 };

    fn element(n: usize) -> WcnElement {
        let coeffs = (0..=n).map(|k| c64(1.0 - 0.3 * k as f64, 0.2 + 0.15 * k as f64)).collect();
        WcnElement::new(coeffs, c64(0.71, -0.52), C).unwrap()
    }

    #[test]
    fn basis_elements_give_unit_vectors() {
        let params = pr();
        for j in 0..4 {
            let f = wp_basis(A, C, j, &params, &pol());
            let tc = taylor_coeffs(&f, A, C, 3, &params, &pol()).unwrap();
            for (k, fk) in tc.f_k.iter().enumerate() {
                let want = if k == j { 1.0 } else { 0.0 };
                assert!((fk - c64(want, 0.0)).norm() < 1e-10, "j={j} k={k} {fk}");
            }
        }
    }

    #[test]
    fn expansion_coefficients_match_closed_form_and_sum() {
        let params = pr();
        let b = c64(1.1, 0.3);
        let n = 4;
        let f = wp_basis(b, C, n, &params, &pol());
        let tc = taylor_coeffs(&f, A, C, n, &params, &pol()).unwrap();
        for k in 0..=n {
            let closed = wp_expansion_coefficient(A, b, C, n, k, &params, &pol()).unwrap();
            assert!(relative_residual(tc.f_k[k], closed) < 1e-9, "k={k}");
        }
        // the same identity read as a summation: (ac, c/a, bz, b/z)_n/(ab, b/a, cz, c/z)_n = 10V9(ac/q; …)
        let q = params.q();
        let lhs = qp_ratio(&[A * C, C / A, b * Z, b / Z], &[A * b, b / A, C * Z, C / Z], n as i64, &params, &pol(), "t").unwrap();
        let spec = VwpSpec::new(A * C / q, vec![A * Z, A / Z, C / b, b * C * params.q_pow(n as i64 - 1), params.q_pow(-(n as i64))], n, &params).unwrap();
        let rhs = vwp_sum(&spec, &params, &pol()).unwrap();
        assert!(relative_residual(lhs, rhs) < 1e-10);
    }

    #[test]
    fn round_trip_reconstruction() {
        let params = pr();
        let el = element(4);
        let f = el.to_function(&params, &pol());
        let tc = taylor_coeffs(&f, A, el.c, 4, &params, &pol()).unwrap();
        for j in 0..20 {
            let z = C64::from_polar(0.6 + 0.04 * j as f64, 0.3 * j as f64 + 0.1);
            let r = tc.reconstruct(z, &params, &pol()).unwrap();
            assert!(relative_residual(r, f.eval(z).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn degree_overflow_detected() {
        let params = pr();
        let f = element(4).to_function(&params, &pol());
        assert!(matches!(
            taylor_coeffs(&f, A, C, 2, &params, &pol()),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn interpolation_matches_prefactor() {
        let params = pr();
        let el = element(3);
        let f = el.to_function(&params, &pol());
        let lhs = interpolation_prefactor(A, C, 3, Z, &params, &pol()).unwrap() * f.eval(Z).unwrap();
        let rhs = interpolate(&f, A, C, 3, Z, &params, &pol()).unwrap();
        assert!(relative_residual(lhs, rhs) < 1e-10);
        // n = 0: both sides are f(a), the prefactor is 1
        let g = SymmetricFunction::constant(c64(0.4, 2.0));
        assert_eq!(interpolation_prefactor(A, C, 0, Z, &params, &pol()).unwrap(), c64(1.0, 0.0));
        assert_eq!(interpolate(&g, A, C, 0, Z, &params, &pol()).unwrap(), c64(0.4, 2.0));
    }

    #[test]
    fn karlsson_minton_12v11() {
        let params = pr();
        let (b, d) = (c64(1.2, -0.3), c64(-0.6, 0.9));
        for s in 0..=4 {
            let l = km_12v11_lhs(A, b, d, 4, s, Z, &params, &pol()).unwrap();
            let r = km_12v11_rhs(A, b, d, 4, s, Z, &params, &pol()).unwrap();
            assert!(relative_residual(l, r) < 1e-10, "s={s}");
        }
    }

    #[test]
    fn karlsson_minton_theta_products_b_j_reading() {
        let params = pr();
        let b = [c64(1.2, -0.3), c64(-0.6, 0.9), c64(0.4, 0.5)];
        let l = km_theta_lhs(A, &b, Z, &params, &pol()).unwrap();
        let r = km_theta_rhs(A, &b, Z, false, &params, &pol()).unwrap();
        assert!(relative_residual(l, r) < 1e-10);
        let lit = km_theta_rhs(A, &b, Z, true, &params, &pol()).unwrap();
        assert!(relative_residual(l, lit) > 1e-3, "literal b_k reading unexpectedly holds");
    }

    #[test]
    fn quadratic_basis_unit_vectors_and_round_trip() {
        let params = pr();
        for j in 0..3 {
            let f = quadratic_basis(C, j, &params, &pol());
            let tc = quadratic_taylor_coeffs(&f, C, 2, &params, &pol()).unwrap();
            for (k, fk) in tc.f_k.iter().enumerate() {
                let want = if k == j { 1.0 } else { 0.0 };
                assert!((fk - c64(want, 0.0)).norm() < 1e-10, "j={j} k={k}");
            }
        }
        let el = element(3);
        let f = el.to_function(&params, &pol());
        let tc = quadratic_taylor_coeffs(&f, el.c, 3, &params, &pol()).unwrap();
        assert!(relative_residual(tc.reconstruct(Z, &params, &pol()).unwrap(), f.eval(Z).unwrap()) < 1e-10);
    }

    #[test]
    fn quadratic_summation() {
        let params = pr();
        for n in 0..5 {
            let l = quadratic_summation_lhs(A, C, n, Z, &params, &pol()).unwrap();
            let r = quadratic_summation_rhs(A, C, n, Z, &params, &pol()).unwrap();
            assert!(relative_residual(l, r) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn pseudo_quadratic_identity_and_reduction() {
        let params = pr();
        for n in 0..5 {
            let l = pseudo_quadratic_lhs(A, C, n, Z, &params, &pol()).unwrap();
            let s = pseudo_quadratic_series(A, C, n, Z, &params, &pol()).unwrap();
            let ft = pseudo_quadratic_closed_form(A, C, n, Z, &params, &pol()).unwrap();
            assert!(relative_residual(l, s) < 1e-10, "n={n}");
            assert!(relative_residual(s, ft) < 1e-10, "n={n}");
        }
        // the reduction with q^{1/4-n/2}/z in the last numerator slot does not hold
        let n = 3i64;
        let u = params.q_pow_quarter(3 - 2 * n);
        let v = params.q_pow_quarter(1 - 2 * n);
        let printed = qp_ratio(&[A * C, C / A, u * Z, v / Z], &[C * Z, C / Z, A * u, u / A], n, &params, &pol(), "t").unwrap();
        let s = pseudo_quadratic_series(A, C, 3, Z, &params, &pol()).unwrap();
        assert!(relative_residual(s, printed) > 1e-3);
    }

    #[test]
    fn ft_cross_check_through_quintuple() {
        // the pseudo-quadratic series is a Frenkel–Turaev sum with a = ac/q
        let params = pr();
        let n = 3usize;
        let tp = |e: i64| params.q_pow_quarter(e);
        let q5 = BalancedQuintuple::solve(A * C / params.q(), A * Z, A / Z, C * tp(2 * n as i64 - 3), n, params.q()).unwrap();
        let ft = ft_rhs(&q5, &params, &pol()).unwrap();
        let s = pseudo_quadratic_series(A, C, n, Z, &params, &pol()).unwrap();
        assert!(relative_residual(ft, s) < 1e-10);
    }

    fn two_var() -> MultivarConfig {
        MultivarConfig::new(vec![A, c64(-0.5, 0.8)], vec![C, c64(0.6, 0.7)], vec![2, 2]).unwrap()
    }

    #[test]
    fn multivariate_taylor_separable_and_single() {
        let params = pr();
        let cfg = two_var();
        let e1 = WcnElement::new(vec![c64(1.0, 0.2), c64(-0.4, 0.3), c64(0.5, -0.1)], c64(0.7, -0.3), cfg.c[0]).unwrap();
        let e2 = WcnElement::new(vec![c64(0.3, 0.9), c64(0.6, 0.1), c64(-0.2, 0.4)], c64(-0.9, 0.2), cfg.c[1]).unwrap();
        let f = MultiFunction::separable(vec![e1.to_function(&params, &pol()), e2.to_function(&params, &pol())]);
        let t = taylor_coeffs_multi(&f, &cfg, &params, &pol()).unwrap();
        let t1 = taylor_coeffs(&e1.to_function(&params, &pol()), cfg.a[0], cfg.c[0], 2, &params, &pol()).unwrap();
        let t2 = taylor_coeffs(&e2.to_function(&params, &pol()), cfg.a[1], cfg.c[1], 2, &params, &pol()).unwrap();
        for k in MultiIndex::new(&cfg.n) {
            assert!(relative_residual(t.get(&k), t1.f_k[k[0]] * t2.f_k[k[1]]) < 1e-10);
        }
        let z = [Z, c64(1.2, 0.5)];
        assert!(relative_residual(reconstruct_multi(&t, &cfg, &z, &params, &pol()).unwrap(), f.eval(&z).unwrap()) < 1e-9);

        // m = 1 agrees with the one-variable routine
        let cfg1 = MultivarConfig::new(vec![A], vec![cfg.c[0]], vec![2]).unwrap();
        let f1 = MultiFunction::separable(vec![e1.to_function(&params, &pol())]);
        let tm = taylor_coeffs_multi(&f1, &cfg1, &params, &pol()).unwrap();
        let ts = taylor_coeffs(&e1.to_function(&params, &pol()), A, cfg.c[0], 2, &params, &pol()).unwrap();
        for k in 0..=2 {
            assert!(relative_residual(tm.data[k], ts.f_k[k]) < 1e-12);
        }
    }

    #[test]
    fn multivariate_km_and_interpolation() {
        let params = pr();
        let a = [A, c64(-0.5, 0.8)];
        let z = [Z, c64(1.2, 0.5)];
        let cfg = KarlssonMintonConfig {
            m: 2,
            b: vec![vec![c64(1.1, 0.4)], vec![c64(0.7, -0.6)]],
            v: vec![vec![1], vec![1]],
            w: vec![(0, 1, 1)],
            pairs: vec![PairFactor { i: 0, j: 1, alpha: c64(0.8, 0.5), u: 1 }],
        };
        assert_eq!(cfg.degrees(), vec![4, 4]);
        let l = km_multi_lhs(&cfg, &a, &z, &params, &pol()).unwrap();
        let r = km_multi_rhs(&cfg, &a, &z, PairPower::Derived, &params, &pol()).unwrap();
        assert!(relative_residual(l, r) < 1e-9, "{l} {r} {}", relative_residual(l, r));
        let printed = km_multi_rhs(&cfg, &a, &z, PairPower::Printed, &params, &pol()).unwrap();
        assert!(relative_residual(l, printed) > 1e-3);

        // the same identity through the generic interpolation formula
        let c = [C, c64(0.6, 0.7)];
        let f = km_multi_function(&cfg, &c, &params, &pol()).unwrap();
        let mcfg = MultivarConfig::new(a.to_vec(), c.to_vec(), cfg.degrees()).unwrap();
        let lhs = interpolation_prefactor_multi(&mcfg, &z, &params, &pol()).unwrap() * f.eval(&z).unwrap();
        let rhs = interpolate_multi(&f, &mcfg, &z, &params, &pol()).unwrap();
        assert!(relative_residual(lhs, rhs) < 1e-9);
    }

    #[test]
    fn theta_form_agrees_with_factorial_form() {
        let params = pr();
        let a = [A, c64(-0.5, 0.8), c64(0.9, 0.3)];
        let z = [Z, c64(1.2, 0.5), c64(-0.7, -0.6)];
        let cfg = KarlssonMintonConfig {
            m: 3,
            b: vec![vec![c64(1.1, 0.4)], vec![], vec![c64(0.7, -0.6)]],
            v: vec![vec![1], vec![], vec![1]],
            w: vec![(0, 2, 1)],
            pairs: vec![PairFactor { i: 0, j: 1, alpha: c64(0.8, 0.5), u: 1 }],
        };
        let l = km_multi_theta_lhs(&cfg, &a, &z, &params, &pol()).unwrap();
        let r = km_multi_theta_rhs(&cfg, &a, &z, PairPower::Derived, &params, &pol()).unwrap();
        assert!(relative_residual(l, r) < 1e-9);
        assert!(relative_residual(l, km_multi_lhs(&cfg, &a, &z, &params, &pol()).unwrap()) < 1e-12);
        let printed = km_multi_theta_rhs(&cfg, &a, &z, PairPower::Printed, &params, &pol()).unwrap();
        assert!(relative_residual(l, printed) > 1e-3);
    }
}
