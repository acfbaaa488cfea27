//! Bhargava's cubic theta function `γ(z,a;p) = Σ_{k,l} p^{k²+kl+l²} a^{k+l} z^{k-l}`,
//! its structural identities, and the two cubic shifted factorials with the
//! summations they satisfy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SymmetricFunction;
use crate::params::{ipow, relative_residual, EllipticParams, TruncationPolicy, C64, MAX_NOME_MODULUS};
use crate::pochhammer::{qp_denominator, qp_fact_base, qp_fact_multi, qp_ratio, qp_ratio_base};
use crate::sum::{csum, CompensatedSum};
use crate::theta::{euler_infinite_product, theta, theta_divisor, theta_multi};

/// Arguments of `γ(z,a;p)` with the nome stored through `s`, `p = s⁶`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicThetaArgs {
    pub z: C64,
    pub a: C64,
    pub s: C64,
}

impl CubicThetaArgs {
    pub fn new(z: C64, a: C64, s: C64) -> Result<Self> {
        if z == C64::new(0.0, 0.0) || a == C64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("CubicThetaArgs"));
        }
        let pm = s.norm().powi(6);
        if !(pm < 1.0) {
            return Err(Error::NomeOutOfRange(pm));
        }
        Ok(Self { z, a, s })
    }

    pub fn p(&self) -> C64 {
        ipow(self.s, 6)
    }

    pub fn eval(&self, policy: &TruncationPolicy) -> Result<C64> {
        gamma(self.z, self.a, self.p(), policy)
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Lattice points with `k² + kl + l² = n`.
fn shell(n: u64, out: &mut Vec<(i64, i64)>) {
    out.clear();
    let kmax = isqrt(4 * n / 3) as i64;
    for k in -kmax..=kmax {
        let disc = 4 * n as i64 - 3 * k * k;
        if disc < 0 {
            continue;
        }
        let d = isqrt(disc as u64) as i64;
        if d * d != disc || (d - k) % 2 != 0 {
            continue;
        }
        out.push((k, (d - k) / 2));
        if d != 0 {
            out.push((k, (-d - k) / 2));
        }
    }
}

/// `γ(z,a;p)`, summed over the shells `k² + kl + l² = N` in ascending order.
///
/// Every term of shell `N` is bounded by `E(N) = |p|^N exp(2√N R)` with
/// `R = (ln²|a|/3 + ln²|z|)^{1/2}` (Cauchy-Schwarz on `(k+l) ln|a| + (k-l) ln|z|`).
/// Past the peak of that envelope, concavity gives `E(N') ≤ E(N) ρ^{N'-N}`,
/// and with at most `6(N'+1)` points per shell the whole remainder is bounded
/// by a geometric series. The sum stops once that bound falls below
/// `tail_tol · |sum|`. Stopping on observed terms alone is unsafe: shells are
/// sparse, and several consecutive ones can miss the dominant direction.
pub fn gamma(z: C64, a: C64, p: C64, policy: &TruncationPolicy) -> Result<C64> {
    if z == C64::new(0.0, 0.0) || a == C64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("gamma"));
    }
    if !z.is_finite() || !a.is_finite() {
        return Err(Error::NonFinite("gamma argument"));
    }
    let pm = p.norm();
    if !(pm <= MAX_NOME_MODULUS) {
        return Err(Error::NomeOutOfRange(pm));
    }
    let one = C64::new(1.0, 0.0);
    if pm == 0.0 {
        return Ok(one);
    }
    let (la, lz) = (a.norm().ln(), z.norm().ln());
    let r = (la * la / 3.0 + lz * lz).sqrt();
    let lp = pm.ln();

    let mut acc = CompensatedSum::new();
    let mut pts = Vec::new();
    let mut pn = one;
    let mut n = 0u64;
    loop {
        if n as usize > policy.max_factors {
            return Err(Error::TruncationExhausted {
                factors: policy.max_factors,
            });
        }
        shell(n, &mut pts);
        for &(k, l) in &pts {
            let term = pn * ipow(a, k + l) * ipow(z, k - l);
            if !term.is_finite() {
                return Err(Error::NonFinite("gamma"));
            }
            acc.add(term);
        }
        if n > 0 {
            let nf = n as f64;
            let slope = lp + r / nf.sqrt();
            if slope < 0.0 {
                let rho = slope.exp();
                let envelope = (nf * lp + 2.0 * nf.sqrt() * r).exp();
                let tail = 6.0 * envelope * ((nf + 1.0) * rho / (1.0 - rho) + rho / ((1.0 - rho) * (1.0 - rho)));
                if tail <= policy.tail_tol * acc.value().norm() {
                    return Ok(acc.finish());
                }
            }
        }
        pn *= p;
        n += 1;
    }
}

/// Plain double loop over `|k|, |l| ≤ k_max`; an independent check on [`gamma`].
pub fn gamma_double_loop(z: C64, a: C64, p: C64, k_max: i64) -> C64 {
    let mut acc = CompensatedSum::new();
    for k in -k_max..=k_max {
        for l in -k_max..=k_max {
            acc.add(ipow(p, k * k + k * l + l * l) * ipow(a, k + l) * ipow(z, k - l));
        }
    }
    acc.value()
}

/// Relative residuals of `γ(1/z,a) = γ(z,a)`, `γ(z,1/a) = γ(z,a)`,
/// `γ(pz,a) = γ(z,a)/(pz²)` and `γ(z,p³a) = γ(z,a)/(p³a²)`.
pub fn gamma_symmetry_residuals(z: C64, a: C64, p: C64, policy: &TruncationPolicy) -> Result<[f64; 4]> {
    if p == C64::new(0.0, 0.0) {
        gamma(z, a, p, policy)?;
        return Ok([0.0; 4]);
    }
    Ok(gamma_symmetry_sides(z, a, p, policy)?.map(|(l, r)| relative_residual(l, r)))
}

/// The four `(lhs, rhs)` pairs behind [`gamma_symmetry_residuals`]; needs `p ≠ 0`.
pub fn gamma_symmetry_sides(z: C64, a: C64, p: C64, policy: &TruncationPolicy) -> Result<[(C64, C64); 4]> {
    let g = gamma(z, a, p, policy)?;
    let p3 = p * p * p;
    Ok([
        (gamma(z.inv(), a, p, policy)?, g),
        (gamma(z, a.inv(), p, policy)?, g),
        (gamma(p * z, a, p, policy)?, g / (p * z * z)),
        (gamma(z, p3 * a, p, policy)?, g / (p3 * a * a)),
    ])
}

/// Relative residual of
/// `γ(z,a;p) = p^{3λ²+3λμ+μ²} a^{2λ+μ} z^μ γ(p^{μ/2}z, p^{3(2λ+μ)/2}a;p)`, `p = s⁶`.
pub fn gamma_functional_eq_residual(
    z: C64,
    a: C64,
    s: C64,
    lambda: i64,
    mu: i64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if lambda == 0 && mu == 0 {
        gamma(z, a, ipow(s, 6), policy)?;
        return Ok(0.0);
    }
    let (lhs, rhs) = gamma_functional_eq_sides(z, a, s, lambda, mu, policy)?;
    Ok(relative_residual(lhs, rhs))
}

/// Both sides of the functional equation.
pub fn gamma_functional_eq_sides(
    z: C64,
    a: C64,
    s: C64,
    lambda: i64,
    mu: i64,
    policy: &TruncationPolicy,
) -> Result<(C64, C64)> {
    let p = ipow(s, 6);
    let lhs = gamma(z, a, p, policy)?;
    let e = 3 * lambda * lambda + 3 * lambda * mu + mu * mu;
    let rhs = ipow(p, e)
        * ipow(a, 2 * lambda + mu)
        * ipow(z, mu)
        * gamma(ipow(s, 3 * mu) * z, ipow(s, 9 * (2 * lambda + mu)) * a, p, policy)?;
    Ok((lhs, rhs))
}

fn pochhammer_inf(b: C64, policy: &TruncationPolicy) -> Result<C64> {
    // (b;b)_∞
    euler_infinite_product(b, b, policy)
}

/// Relative residuals of the split of `γ` by the residue of `k - l` modulo 3,
///
/// `γ(z,a;p) = γ(u, a²/u;p³) + p a z^{-1} γ(u, p³a²/u;p³) + p a z γ(ũ, p³a²/ũ;p³)`
/// with `u = √(az³)`, `ũ = √(a/z³)`, and of the split by the parity of `k - l`,
///
/// `γ(z,a;p) = (p⁶;p⁶)_∞(p²;p²)_∞ [θ(-p³a²;p⁶)θ(-pz²;p²) + paz θ(-p⁶a²;p⁶)θ(-p²z²;p²)]`.
///
/// Each square root is taken once and its partner formed as `a²/root`.
pub fn gamma_splitting_residuals(z: C64, a: C64, s: C64, policy: &TruncationPolicy) -> Result<[f64; 2]> {
    if s == C64::new(0.0, 0.0) {
        // γ = 1 = 1 + 0 + 0 and 1 = 1·[1·1 + 0]
        gamma(z, a, s, policy)?;
        return Ok([0.0, 0.0]);
    }
    Ok(gamma_splitting_sides(z, a, s, policy)?.map(|(l, r)| relative_residual(l, r)))
}

/// The `(γ, cube split)` and `(γ, parity split)` pairs; needs `p ≠ 0`.
pub fn gamma_splitting_sides(z: C64, a: C64, s: C64, policy: &TruncationPolicy) -> Result<[(C64, C64); 2]> {
    let p = ipow(s, 6);
    let g = gamma(z, a, p, policy)?;
    let p3 = p * p * p;
    let a2 = a * a;
    let u = (a * z * z * z).sqrt();
    let ut = (a / (z * z * z)).sqrt();
    let cube = csum([
        gamma(u, a2 / u, p3, policy)?,
        p * a / z * gamma(u, p3 * a2 / u, p3, policy)?,
        p * a * z * gamma(ut, p3 * a2 / ut, p3, policy)?,
    ]);
    let parity = parity_split(z, a, p, a2, policy)?;
    Ok([(g, cube), (g, parity)])
}

fn parity_split(z: C64, a: C64, p: C64, first: C64, policy: &TruncationPolicy) -> Result<C64> {
    let (p2, p3) = (p * p, p * p * p);
    let p6 = p3 * p3;
    let z2 = z * z;
    Ok(pochhammer_inf(p6, policy)?
        * pochhammer_inf(p2, policy)?
        * csum([
            theta(-p3 * first, p6, policy)? * theta(-p * z2, p2, policy)?,
            p * a * z * theta(-p6 * a * a, p6, policy)? * theta(-p2 * z2, p2, policy)?,
        ]))
}

/// The two splittings in the form they are sometimes printed: the cube split
/// with only the first two terms, and the parity split with `θ(-p³a;p⁶)` in
/// the first product. Neither holds; kept so tests can document it.
pub fn gamma_splitting_literal_residuals(z: C64, a: C64, s: C64, policy: &TruncationPolicy) -> Result<[f64; 2]> {
    let p = ipow(s, 6);
    let g = gamma(z, a, p, policy)?;
    let p3 = p * p * p;
    let a2 = a * a;
    let u = (a * z * z * z).sqrt();
    let cube = gamma(u, a2 / u, p3, policy)? + p * a / z * gamma(u, p3 * a2 / u, p3, policy)?;
    let parity = parity_split(z, a, p, a, policy)?;
    Ok([relative_residual(g, cube), relative_residual(g, parity)])
}

/// First addition formula:
/// `γ(z₁,α)θ(z₃/z₂, z₂z₃) - γ(z₂,α)θ(z₃/z₁, z₁z₃) = (z₃/z₁) γ(z₃,α)θ(z₁/z₂, z₁z₂)`, all with nome `p`.
pub fn cooper_toh_first_residual(
    z1: C64,
    z2: C64,
    z3: C64,
    alpha: C64,
    p: C64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let (lhs, rhs) = cooper_toh_first_sides(z1, z2, z3, alpha, p, policy)?;
    Ok(relative_residual(lhs, rhs))
}

pub fn cooper_toh_first_sides(
    z1: C64,
    z2: C64,
    z3: C64,
    alpha: C64,
    p: C64,
    policy: &TruncationPolicy,
) -> Result<(C64, C64)> {
    let lhs = csum([
        gamma(z1, alpha, p, policy)? * theta_multi(&[z3 / z2, z2 * z3], p, policy)?,
        -gamma(z2, alpha, p, policy)? * theta_multi(&[z3 / z1, z1 * z3], p, policy)?,
    ]);
    let rhs = z3 / z1 * gamma(z3, alpha, p, policy)? * theta_multi(&[z1 / z2, z1 * z2], p, policy)?;
    Ok((lhs, rhs))
}

/// Second addition formula, with `γ` at nome `p^{1/3} = s²` and `θ` at `p = s⁶`:
/// `γ(z,a₁)θ(a₃/a₂, a₂a₃) - γ(z,a₂)θ(a₃/a₁, a₁a₃) = (a₃/a₁) γ(z,a₃)θ(a₁/a₂, a₁a₂)`.
pub fn cooper_toh_second_residual(
    z: C64,
    a1: C64,
    a2: C64,
    a3: C64,
    s: C64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let (lhs, rhs) = cooper_toh_second_sides(z, a1, a2, a3, s, policy)?;
    Ok(relative_residual(lhs, rhs))
}

pub fn cooper_toh_second_sides(
    z: C64,
    a1: C64,
    a2: C64,
    a3: C64,
    s: C64,
    policy: &TruncationPolicy,
) -> Result<(C64, C64)> {
    let big_p = s * s;
    let p = ipow(s, 6);
    let lhs = csum([
        gamma(z, a1, big_p, policy)? * theta_multi(&[a3 / a2, a2 * a3], p, policy)?,
        -gamma(z, a2, big_p, policy)? * theta_multi(&[a3 / a1, a1 * a3], p, policy)?,
    ]);
    let rhs = a3 / a1 * gamma(z, a3, big_p, policy)? * theta_multi(&[a1 / a2, a1 * a2], p, policy)?;
    Ok((lhs, rhs))
}

/// The two cubic theta analogues of `(az, a/z;q,p)_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CubicFamily {
    /// `⟨az, a/z;q,p⟩_n = ∏_j γ(zq^{(1-n)/2+j}, aq^{(n-1)/2};p)`.
    First,
    /// `⟨⟨az, a/z;q,p^{1/3}⟩⟩_n = ∏_j γ(aq^{(n-1)/2}, zq^{(1-n)/2+j};p^{1/3})`.
    Second,
}

impl CubicFamily {
    pub fn name(self) -> &'static str {
        match self {
            CubicFamily::First => "first",
            CubicFamily::Second => "second",
        }
    }
}

/// `⟨az, a/z;q,p⟩_n`, written through `a` and `z` separately so that the
/// half-integer powers of `q` come from `t²`.
pub fn cubic_fact_1(a: C64, z: C64, n: usize, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    cubic_fact(CubicFamily::First, a, z, n, params, policy)
}

/// `⟨⟨az, a/z;q,p^{1/3}⟩⟩_n`.
pub fn cubic_fact_2(a: C64, z: C64, n: usize, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    cubic_fact(CubicFamily::Second, a, z, n, params, policy)
}

pub fn cubic_fact(
    family: CubicFamily,
    a: C64,
    z: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let ni = n as i64;
    let shifted_a = a * params.q_pow_half(ni - 1);
    let q = params.q();
    let mut y = z * params.q_pow_half(1 - ni);
    let mut prod = C64::new(1.0, 0.0);
    for _ in 0..n {
        prod *= match family {
            CubicFamily::First => gamma(y, shifted_a, params.p(), policy)?,
            CubicFamily::Second => gamma(shifted_a, y, params.p_third(), policy)?,
        };
        y *= q;
    }
    if !prod.is_finite() {
        return Err(Error::NonFinite("cubic shifted factorial"));
    }
    Ok(prod)
}

/// Relative residual of `F(a, pz)_n = p^{-n} z^{-2n} F(a, z)_n` for either family.
pub fn cubic_fact_quasi_period_residual(
    family: CubicFamily,
    a: C64,
    z: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let p = params.p();
    let lhs = cubic_fact(family, a, p * z, n, params, policy)?;
    let rhs = cubic_fact(family, a, z, n, params, policy)? / ipow(p * z * z, n as i64);
    Ok(relative_residual(lhs, rhs))
}

/// `F(b, z)_n / (cz, c/z;q,p)_n` as a function of `z`; an element of `W_c^n`.
pub fn cubic_quotient(
    family: CubicFamily,
    b: C64,
    c: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> SymmetricFunction {
    let (params, policy) = (*params, *policy);
    SymmetricFunction::new(move |z| {
        Ok(cubic_fact(family, b, z, n, &params, &policy)?
            / qp_denominator(&[c * z, c / z], n as i64, &params, &policy, "cubic quotient")?)
    })
}

/// Largest relative defect of `f(1/z) = f(z)` and `f(pz) = f(z)` over the probes.
///
/// Both hold for every element of `W_c^n`: the numerator is an even theta
/// function of degree `n`, picking up `p^{-n}z^{-2n}` under `z ↦ pz`, and the
/// denominator `(cz, c/z;q,p)_n` picks up the same factor.
pub fn wcn_membership_defect(f: &SymmetricFunction, probes: &[C64], params: &EllipticParams) -> Result<f64> {
    let p = params.p();
    let mut worst = 0.0f64;
    for &z in probes {
        let fz = f.eval(z)?;
        worst = worst.max(relative_residual(f.eval(z.inv())?, fz));
        if p != C64::new(0.0, 0.0) {
            worst = worst.max(relative_residual(f.eval(p * z)?, fz));
        }
    }
    Ok(worst)
}

/// Largest relative defect of the degree-`n` law `g(pz) p^n z^{2n} = g(z)` and
/// of `g(1/z) = g(z)` for the numerator `g(z) = F(b, z)_n`.
pub fn cubic_fact_theta_degree_defect(
    family: CubicFamily,
    b: C64,
    n: usize,
    probes: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let p = params.p();
    let mut worst = 0.0f64;
    for &z in probes {
        let gz = cubic_fact(family, b, z, n, params, policy)?;
        worst = worst.max(relative_residual(cubic_fact(family, b, z.inv(), n, params, policy)?, gz));
        if p != C64::new(0.0, 0.0) {
            let shifted = cubic_fact(family, b, p * z, n, params, policy)? * ipow(p * z * z, n as i64);
            worst = worst.max(relative_residual(shifted, gz));
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Summations

fn wp_weight(x: C64, k: i64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    // θ(xq^{2k})/θ(x)
    Ok(theta(x * params.q_pow(2 * k), params.p(), policy)?
        / theta_divisor(x, params.p(), policy, "very-well-poised weight", k)?)
}

/// Left side of the cubic extension of Jackson's summation (either family):
/// `(bc, c/b)_n F(a,z)_n / (cz, c/z)_n`.
#[allow(clippy::too_many_arguments)]
pub fn cubic_jackson_lhs(
    family: CubicFamily,
    a: C64,
    b: C64,
    c: C64,
    z: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    Ok(qp_ratio(&[b * c, c / b], &[c * z, c / z], n as i64, params, policy, "cubic Jackson")?
        * cubic_fact(family, a, z, n, params, policy)?)
}

/// Right side of the cubic Jackson summation,
/// `Σ_k q^{nk} (c/b)^k θ(bcq^{2k-1})/θ(bc/q) (q^{-n}, bc/q, bz, b/z)_k/(q, bcq^n, cz, c/z)_k · C_k`,
/// where for the first family
/// `C_k = ⟨acq^{n-1}, aq^{1-k}/c⟩_k ⟨abq^k, aq^{-k}/b⟩_n / ⟨abq^n, aq^{-k}/b⟩_k`
/// and for the second
/// `C_k = ⟨⟨acq^{n-1}, aq^{1-k}/c⟩⟩_k ⟨⟨abq^k, a/b⟩⟩_{n-k}`.
#[allow(clippy::too_many_arguments)]
pub fn cubic_jackson_rhs(
    family: CubicFamily,
    a: C64,
    b: C64,
    c: C64,
    z: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let ni = n as i64;
    let q = params.q();
    let tp = |e: i64| params.q_pow_quarter(e);
    let bc = b * c;
    let mut acc = CompensatedSum::new();
    for k in 0..=ni {
        let ku = k as usize;
        let head = params.q_pow(ni * k)
            * ipow(c / b, k)
            * theta(bc * params.q_pow(2 * k - 1), params.p(), policy)?
            / theta_divisor(bc / q, params.p(), policy, "cubic Jackson", 0)?
            * qp_ratio(
                &[params.q_pow(-ni), bc / q, b * z, b / z],
                &[q, bc * params.q_pow(ni), c * z, c / z],
                k,
                params,
                policy,
                "cubic Jackson",
            )?;
        let first = cubic_fact(family, a * tp(2 * (ni - k)), c * tp(2 * (ni + k) - 4), ku, params, policy)?;
        let rest = match family {
            CubicFamily::First => {
                cubic_fact(family, a, b * params.q_pow(k), n, params, policy)?
                    / cubic_fact(family, a * tp(2 * (ni - k)), b * tp(2 * (ni + k)), ku, params, policy)?
            }
            CubicFamily::Second => cubic_fact(family, a * tp(2 * k), b * tp(2 * k), n - ku, params, policy)?,
        };
        acc.add(head * first * rest);
    }
    let v = acc.finish();
    if !v.is_finite() {
        return Err(Error::NonFinite("cubic Jackson"));
    }
    Ok(v)
}

/// Interpolation node weight shared by the Karlsson–Minton type sums:
/// `q^{k(n+1)} θ(a²q^{2k})/θ(a²) (q^{-n}, a², az, a/z)_k / (q, a²q^{n+1}, aqz, aq/z)_k`.
fn km_weight(a: C64, z: C64, n: usize, k: i64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    let ni = n as i64;
    let q = params.q();
    let a2 = a * a;
    Ok(params.q_pow(k * (ni + 1))
        * wp_weight(a2, k, params, policy)?
        * qp_ratio(
            &[params.q_pow(-ni), a2, a * z, a / z],
            &[q, a2 * params.q_pow(ni + 1), a * q * z, a * q / z],
            k,
            params,
            policy,
            "cubic Karlsson-Minton",
        )?)
}

fn km_prefactor(a: C64, z: C64, n: usize, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    let q = params.q();
    qp_ratio(&[a * a * q, q], &[a * q * z, a * q / z], n as i64, params, policy, "cubic Karlsson-Minton")
}

/// Left side of the cubic Karlsson–Minton identity:
/// `(a²q, q)_n/(aqz, aq/z)_n ⟨bz, b/z⟩_n`.
pub fn cubic_km_lhs(a: C64, b: C64, z: C64, n: usize, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    Ok(km_prefactor(a, z, n, params, policy)? * cubic_fact_1(b, z, n, params, policy)?)
}

/// Right side: `Σ_k (node weight) ⟨abq^k, bq^{-k}/a⟩_n`.
pub fn cubic_km_rhs(a: C64, b: C64, z: C64, n: usize, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    let mut acc = CompensatedSum::new();
    for k in 0..=n as i64 {
        acc.add(km_weight(a, z, n, k, params, policy)? * cubic_fact_1(b, a * params.q_pow(k), n, params, policy)?);
    }
    Ok(acc.finish())
}

/// Left side of the mixed theta/cubic Karlsson–Minton identity,
/// `(a²q, q)_n/(aqz, aq/z)_n ∏_i θ(b_i z, b_i/z) ∏_j γ(z, d_j)` with `n = #b + #d`.
pub fn cubic_km_mixed_lhs(
    a: C64,
    b: &[C64],
    d: &[C64],
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = b.len() + d.len();
    let p = params.p();
    let mut v = km_prefactor(a, z, n, params, policy)?;
    for &bi in b {
        v *= theta_multi(&[bi * z, bi / z], p, policy)?;
    }
    for &dj in d {
        v *= gamma(z, dj, p, policy)?;
    }
    Ok(v)
}

/// Right side: `Σ_k (node weight) ∏_i θ(ab_iq^k, b_iq^{-k}/a) ∏_j γ(aq^k, d_j)`.
pub fn cubic_km_mixed_rhs(
    a: C64,
    b: &[C64],
    d: &[C64],
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = b.len() + d.len();
    let p = params.p();
    let mut acc = CompensatedSum::new();
    for k in 0..=n as i64 {
        let qk = params.q_pow(k);
        let mut term = km_weight(a, z, n, k, params, policy)?;
        for &bi in b {
            term *= theta_multi(&[a * bi * qk, bi / (qk * a)], p, policy)?;
        }
        for &dj in d {
            term *= gamma(a * qk, dj, p, policy)?;
        }
        acc.add(term);
    }
    Ok(acc.finish())
}

/// Left side of the cubic Gessel–Stanton type summation (either family):
/// `F(a,z)_n/(cz, c/z)_n (cq^{-1/4}, cq^{1/4})_n`.
pub fn cubic_gessel_stanton_lhs(
    family: CubicFamily,
    a: C64,
    c: C64,
    z: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let t = params.t;
    Ok(cubic_fact(family, a, z, n, params, policy)?
        * qp_ratio(&[c / t, c * t], &[c * z, c / z], n as i64, params, policy, "cubic Gessel-Stanton")?)
}

/// Right side:
/// `Σ_k c^k q^{k(k-2)/4+nk} θ(cq^{3k/2-3/4})/θ(cq^{k/2-3/4}) (q^{-n})_k/(q)_k
///  (cq^{-1/4};q^{1/2})_k/(cq^{n-1/4};q^{1/2})_k (q^{1/4}z, q^{1/4}/z;q^{1/2})_k/(cz, c/z)_k
///  · F(acq^{n-1}, aq^{1-k}/c)_k F(aq^{k/2+1/4}, aq^{k/2-1/4})_{n-k}`.
pub fn cubic_gessel_stanton_rhs(
    family: CubicFamily,
    a: C64,
    c: C64,
    z: C64,
    n: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let ni = n as i64;
    let t = params.t;
    let p = params.p();
    let h = params.q_half();
    let tp = |e: i64| params.q_pow_quarter(e);
    let mut acc = CompensatedSum::new();
    for k in 0..=ni {
        let ku = k as usize;
        let head = ipow(c, k) * tp(k * (k - 2) + 4 * ni * k) * theta(c * tp(6 * k - 3), p, policy)?
            / theta_divisor(c * tp(2 * k - 3), p, policy, "cubic Gessel-Stanton", k)?
            * qp_ratio(&[params.q_pow(-ni)], &[params.q()], k, params, policy, "cubic Gessel-Stanton")?
            * qp_ratio_base(&[c / t], &[c * tp(4 * ni - 1)], h, k, p, policy, "cubic Gessel-Stanton")?
            * qp_fact_base(t * z, h, k, p, policy)?
            * qp_fact_base(t / z, h, k, p, policy)?
            / qp_denominator(&[c * z, c / z], k, params, policy, "cubic Gessel-Stanton")?;
        let first = cubic_fact(family, a * tp(2 * (ni - k)), c * tp(2 * (ni + k) - 4), ku, params, policy)?;
        let second = cubic_fact(family, a * tp(2 * k), t, n - ku, params, policy)?;
        acc.add(head * first * second);
    }
    let v = acc.finish();
    if !v.is_finite() {
        return Err(Error::NonFinite("cubic Gessel-Stanton"));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// p → 0 studies

/// Residuals of the scaled cubic factorial against `(az, a/z;q)_n` as `p → 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationStudy {
    pub family: CubicFamily,
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `r_i / r_{i+1}`.
    pub ratios: Vec<f64>,
    /// Mean of `ln(r_i/r_{i+1}) / ln(p_i/p_{i+1})`; `None` when a residual is zero.
    pub empirical_order: Option<f64>,
    /// Strictly decreasing residuals, or all exactly zero.
    pub monotone: bool,
}

/// Substitutes `a ↦ -a/(p^e(1 + a²q^{n-1}))` (`e = 1` for the first family,
/// `e = 1/3` for the second), scales by `(1 + a²q^{n-1})^n` and compares with
/// `(az, a/z;q)_n` for each `p` in `p_values`.
pub fn degeneration_check(
    family: CubicFamily,
    a: C64,
    z: C64,
    q: C64,
    n: usize,
    p_values: &[f64],
    policy: &TruncationPolicy,
) -> Result<DegenerationStudy> {
    if p_values.is_empty() {
        return Err(Error::InvalidParameter("degeneration study needs at least one p".into()));
    }
    if p_values.iter().any(|&p| !(p > 0.0 && p < 0.01)) {
        return Err(Error::InvalidParameter("degeneration p values must lie in (0, 0.01)".into()));
    }
    if p_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("degeneration p values must be decreasing".into()));
    }
    let ni = n as i64;
    let basic = EllipticParams::with_principal_roots(q, C64::new(0.0, 0.0))?;
    let target = qp_fact_multi(&[a * z, a / z], ni, &basic, policy)?;
    let scale = C64::new(1.0, 0.0) + a * a * basic.q_pow(ni - 1);
    let mut residuals = Vec::with_capacity(p_values.len());
    for &pv in p_values {
        let params = EllipticParams::with_principal_roots(q, C64::new(pv, 0.0))?;
        let shrink = match family {
            CubicFamily::First => params.p(),
            CubicFamily::Second => params.p_third(),
        };
        let sub = -a / (shrink * scale);
        let v = ipow(scale, ni) * cubic_fact(family, sub, z, n, &params, policy)?;
        residuals.push(if n == 0 { 0.0 } else { relative_residual(v, target) });
    }
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let all_zero = residuals.iter().all(|&r| r == 0.0);
    let monotone = all_zero || residuals.windows(2).all(|w| w[1] < w[0]);
    let empirical_order = if residuals.contains(&0.0) || residuals.len() < 2 {
        None
    } else {
        let orders: Vec<f64> = residuals
            .windows(2)
            .zip(p_values.windows(2))
            .map(|(r, p)| (r[0] / r[1]).ln() / (p[0] / p[1]).ln())
            .collect();
        Some(orders.iter().sum::<f64>() / orders.len() as f64)
    };
    Ok(DegenerationStudy {
        family,
        p_values: p_values.to_vec(),
        residuals,
        ratios,
        empirical_order,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::c64;
    use proptest::prelude::*;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn oracle(z: C64, a: C64, p: C64) -> C64 {
        let mut acc = CompensatedSum::new();
        for k in -40i64..=40 {
            for l in -40i64..=40 {
                let e = k * k + k * l + l * l;
                if e > 2000 {
                    continue;
                }
                acc.add(ipow(p, e) * ipow(a, k + l) * ipow(z, k - l));
            }
        }
        acc.value()
    }

    fn pr() -> EllipticParams {
        EllipticParams::new(c64(0.82, 0.13), c64(0.74, 0.17)).unwrap()
    }

    #[test]
    fn shells_enumerate_the_lattice() {
        let mut pts = Vec::new();
        let counts: Vec<usize> = (0..8).map(|n| {
            shell(n, &mut pts);
            pts.iter().for_each(|&(k, l)| assert_eq!((k * k + k * l + l * l) as u64, n));
            pts.len()
        }).collect();
        assert_eq!(counts, vec![1, 6, 0, 6, 6, 0, 0, 12]);
    }

    #[test]
    fn gamma_basics() {
        assert_eq!(gamma(c64(0.3, 2.0), c64(5.0, 1.0), c64(0.0, 0.0), &pol()).unwrap(), c64(1.0, 0.0));
        let (z, a, p) = (c64(0.8, 0.1), c64(1.2, 0.0), c64(0.15, 0.0));
        assert!(relative_residual(gamma(z, a, p, &pol()).unwrap(), oracle(z, a, p)) < 1e-13);
        assert!(matches!(gamma(c64(0.0, 0.0), a, p, &pol()), Err(Error::ZeroArgument(_))));
        assert!(matches!(gamma(z, a, c64(0.995, 0.0), &pol()), Err(Error::NomeOutOfRange(_))));
    }

    #[test]
    fn sparse_shells_do_not_stop_the_sum_early() {
        // Far-off arguments: the dominant terms sit on shells separated by empty ones.
        let params = EllipticParams::new(c64(-0.5407817446663851, -0.4048683776115364), c64(0.7604868305403131, -0.44541155897565476)).unwrap();
        let z = c64(-0.08073215658103239, 0.023535238676005925);
        let a = c64(-0.0003649307162567971, -0.00026801901245838885);
        let want = c64(-4.209314506357e44, -1.124151348725e44);
        let got = gamma(z, a, params.p_third(), &pol()).unwrap();
        assert!(relative_residual(got, want) < 1e-12, "{got}");
    }

    #[test]
    fn symmetries_and_functional_equation() {
        let (z, a) = (c64(0.7, -0.9), c64(-1.3, 0.4));
        let r = gamma_symmetry_residuals(z, a, c64(0.2, 0.0), &pol()).unwrap();
        assert!(r.iter().all(|&x| x < 1e-11), "{r:?}");
        assert_eq!(gamma_symmetry_residuals(z, a, c64(0.0, 0.0), &pol()).unwrap(), [0.0; 4]);
        let zz = gamma_symmetry_residuals(z, z, c64(0.2, 0.0), &pol()).unwrap();
        assert!(zz.iter().all(|&x| x < 1e-11));
        let s = C64::new(0.1f64.powf(1.0 / 6.0), 0.0);
        assert_eq!(gamma_functional_eq_residual(z, a, s, 0, 0, &pol()).unwrap(), 0.0);
        assert!(gamma_functional_eq_residual(z, a, s, 1, -1, &pol()).unwrap() < 1e-10);
        // (0, 2) is the z-quasi-period applied twice
        let p = ipow(s, 6);
        let twice = gamma(p * p * z, a, p, &pol()).unwrap() * (p * z * z) * (p * (p * z) * (p * z));
        assert!(relative_residual(twice, gamma(z, a, p, &pol()).unwrap()) < 1e-11);
        assert!(gamma_functional_eq_residual(z, a, s, 0, 2, &pol()).unwrap() < 1e-10);
    }

    #[test]
    fn splittings() {
        let s = C64::new(0.2f64.powf(1.0 / 6.0), 0.0);
        let (z, a) = (c64(0.9, 0.5), c64(0.6, -0.8));
        let r = gamma_splitting_residuals(z, a, s, &pol()).unwrap();
        assert!(r[0] < 1e-10 && r[1] < 1e-10, "{r:?}");
        let lit = gamma_splitting_literal_residuals(z, a, s, &pol()).unwrap();
        assert!(lit[0] > 1e-3 && lit[1] > 1e-3, "{lit:?}");
        // unit-circle z, positive a: the branch rule keeps both splits exact
        let r = gamma_splitting_residuals(C64::from_polar(1.0, 2.3), c64(1.7, 0.0), s, &pol()).unwrap();
        assert!(r[0] < 1e-10 && r[1] < 1e-10, "{r:?}");
        assert_eq!(gamma_splitting_residuals(z, a, c64(0.0, 0.0), &pol()).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn cooper_toh() {
        let p = c64(0.15, 0.0);
        let (z1, z2, z3, al) = (c64(0.8, 0.4), c64(-0.5, 1.1), c64(1.2, -0.3), c64(0.7, 0.6));
        assert!(cooper_toh_first_residual(z1, z2, z3, al, p, &pol()).unwrap() < 1e-10);
        assert!(cooper_toh_first_residual(z1, z2, z2, al, p, &pol()).unwrap() < 1e-12);
        let s = C64::new(0.15f64.powf(1.0 / 6.0), 0.0);
        assert!(cooper_toh_second_residual(z1, z2, z3, al, s, &pol()).unwrap() < 1e-10);
        assert!(cooper_toh_second_residual(z1, z2, z3, z2, s, &pol()).unwrap() < 1e-12);
    }

    #[test]
    fn cubic_factorials() {
        let params = pr();
        let (a, z) = (c64(0.9, 0.3), c64(0.6, -0.7));
        for fam in [CubicFamily::First, CubicFamily::Second] {
            assert_eq!(cubic_fact(fam, a, z, 0, &params, &pol()).unwrap(), c64(1.0, 0.0));
            for n in 1..4 {
                assert!(cubic_fact_quasi_period_residual(fam, a, z, n, &params, &pol()).unwrap() < 1e-10);
                let f = cubic_quotient(fam, a, c64(-0.4, 0.8), n, &params, &pol());
                let probes = [c64(0.7, 0.4), c64(-1.1, 0.3), c64(0.5, -0.9)];
                assert!(wcn_membership_defect(&f, &probes, &params).unwrap() < 1e-10);
                assert!(cubic_fact_theta_degree_defect(fam, a, n, &probes, &params, &pol()).unwrap() < 1e-10);
            }
        }
        let one = cubic_fact_2(a, z, 1, &params, &pol()).unwrap();
        assert!(relative_residual(one, gamma(a, z, params.p_third(), &pol()).unwrap()) < 1e-15);
    }

    #[test]
    fn cubic_summations() {
        let params = pr();
        let (a, b, c, z) = (c64(0.9, 0.3), c64(-0.7, 0.8), c64(0.5, 1.1), c64(1.1, -0.4));
        for n in 0..4 {
            for fam in [CubicFamily::First, CubicFamily::Second] {
                let l = cubic_jackson_lhs(fam, a, b, c, z, n, &params, &pol()).unwrap();
                let r = cubic_jackson_rhs(fam, a, b, c, z, n, &params, &pol()).unwrap();
                assert!(relative_residual(l, r) < 1e-9, "jackson {fam:?} n={n}");
                let l = cubic_gessel_stanton_lhs(fam, a, c, z, n, &params, &pol()).unwrap();
                let r = cubic_gessel_stanton_rhs(fam, a, c, z, n, &params, &pol()).unwrap();
                assert!(relative_residual(l, r) < 1e-9, "gessel-stanton {fam:?} n={n}");
            }
            let l = cubic_km_lhs(a, b, z, n, &params, &pol()).unwrap();
            let r = cubic_km_rhs(a, b, z, n, &params, &pol()).unwrap();
            assert!(relative_residual(l, r) < 1e-9, "km n={n}");
        }
        let bs = [c64(1.2, 0.1)];
        let ds = [c64(0.4, 0.9), c64(-1.0, 0.5)];
        let l = cubic_km_mixed_lhs(a, &bs, &ds, z, &params, &pol()).unwrap();
        let r = cubic_km_mixed_rhs(a, &bs, &ds, z, &params, &pol()).unwrap();
        assert!(relative_residual(l, r) < 1e-9);
    }

    #[test]
    fn degenerations() {
        let (a, z, q) = (c64(0.7, 0.2), c64(0.9, -0.3), c64(0.4, 0.0));
        let grid = [1e-3, 1e-4, 1e-5];
        let zero = degeneration_check(CubicFamily::First, a, z, q, 0, &grid, &pol()).unwrap();
        assert!(zero.residuals.iter().all(|&r| r == 0.0) && zero.monotone);
        let first = degeneration_check(CubicFamily::First, a, z, q, 2, &grid, &pol()).unwrap();
        assert!(first.monotone);
        assert!(first.ratios.iter().all(|&r| (3.0..=30.0).contains(&r)), "{:?}", first.ratios);
        let order = first.empirical_order.unwrap();
        assert!((order - 1.0).abs() < 0.1);
        let second = degeneration_check(CubicFamily::Second, a, z, q, 2, &grid, &pol()).unwrap();
        assert!(second.monotone, "{:?}", second.residuals);
        // the scaled second factorial does not converge: residuals stay near 1
        assert!(second.residuals.iter().all(|&r| r > 0.5));
        assert!(degeneration_check(CubicFamily::First, a, z, q, 2, &[1e-4, 1e-3], &pol()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gamma_matches_double_loop(
            zr in 0.3f64..3.0, zt in 0.0f64..std::f64::consts::TAU,
            ar in 0.3f64..3.0, at in 0.0f64..std::f64::consts::TAU,
            pr in 0.0f64..0.5, pt in 0.0f64..std::f64::consts::TAU,
        ) {
            let (z, a, p) = (C64::from_polar(zr, zt), C64::from_polar(ar, at), C64::from_polar(pr, pt));
            let g = gamma(z, a, p, &pol()).unwrap();
            prop_assert!(relative_residual(g, oracle(z, a, p)) < 1e-12);
        }

        #[test]
        fn structural_suite(
            zr in 0.4f64..2.5, zt in 0.0f64..std::f64::consts::TAU,
            ar in 0.4f64..2.5, at in 0.0f64..std::f64::consts::TAU,
            sr in 0.45f64..0.89, st in 0.0f64..std::f64::consts::TAU,
        ) {
            let (z, a, s) = (C64::from_polar(zr, zt), C64::from_polar(ar, at), C64::from_polar(sr, st));
            let p = ipow(s, 6);
            let r = gamma_symmetry_residuals(z, a, p, &pol()).unwrap();
            prop_assert!(r.iter().all(|&x| x < 1e-10), "{:?}", r);
            let sp = gamma_splitting_residuals(z, a, s, &pol()).unwrap();
            prop_assert!(sp.iter().all(|&x| x < 1e-9), "{:?}", sp);
            prop_assert!(cooper_toh_first_residual(z, a, z * a, a.inv(), p, &pol()).unwrap() < 1e-10);
            prop_assert!(cooper_toh_second_residual(z, a, a * z, z.inv(), s, &pol()).unwrap() < 1e-10);
        }
    }
}
