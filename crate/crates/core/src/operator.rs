//! The elliptic Askey–Wilson operator `D_{c,q,p}`, its iterates computed both
//! recursively and through the explicit single-sum formula, and the
//! per-variable multivariate extension.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::{ipow, relative_residual, EllipticParams, TruncationPolicy, C64};
use crate::pochhammer::{elliptic_binomial, qp_denominator, qp_fact_multi, qp_ratio};
use crate::sum::{csum, note_condition, track_condition, CompensatedSum};
use crate::theta::{lattice_defect, theta, theta_divisor, theta_multi, POLE_TOL};

type Eval1 = dyn Fn(C64) -> Result<C64> + Send + Sync;
type EvalN = dyn Fn(&[C64]) -> Result<C64> + Send + Sync;

/// A function of `z` assumed symmetric under `z ↔ 1/z`.
///
/// The symmetry is a contract: [`SymmetricFunction::symmetry_defect`] probes it,
/// nothing enforces it.
#[derive(Clone)]
pub struct SymmetricFunction {
    f: Arc<Eval1>,
}

impl fmt::Debug for SymmetricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SymmetricFunction")
    }
}

impl SymmetricFunction {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(C64) -> Result<C64> + Send + Sync + 'static,
    {
        Self { f: Arc::new(f) }
    }

    pub fn constant(v: C64) -> Self {
        Self::new(move |_| Ok(v))
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if z == C64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("SymmetricFunction::eval"));
        }
        (self.f)(z)
    }

    /// Largest relative mismatch between `f(z)` and `f(1/z)` over the probes.
    pub fn symmetry_defect(&self, probes: &[C64]) -> Result<f64> {
        probes.iter().try_fold(0.0f64, |worst, &z| {
            Ok(worst.max(relative_residual(self.eval(z)?, self.eval(z.inv())?)))
        })
    }
}

/// A function of several variables, each slot symmetric under `z_i ↔ 1/z_i`.
#[derive(Clone)]
pub struct MultiFunction {
    f: Arc<EvalN>,
    arity: usize,
}

impl fmt::Debug for MultiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiFunction(arity = {})", self.arity)
    }
}

impl MultiFunction {
    pub fn new<F>(arity: usize, f: F) -> Self
    where
        F: Fn(&[C64]) -> Result<C64> + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            arity,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.arity {
            return Err(Error::InvalidParameter(format!(
                "expected {} variables, got {}",
                self.arity,
                z.len()
            )));
        }
        if z.iter().any(|x| *x == C64::new(0.0, 0.0)) {
            return Err(Error::ZeroArgument("MultiFunction::eval"));
        }
        (self.f)(z)
    }

    /// Product of one-variable functions, one per slot.
    pub fn separable(parts: Vec<SymmetricFunction>) -> Self {
        let arity = parts.len();
        Self::new(arity, move |z| {
            parts
                .iter()
                .zip(z)
                .try_fold(C64::new(1.0, 0.0), |acc, (f, &zi)| Ok(acc * f.eval(zi)?))
        })
    }
}

/// The well-poised monomial `z ↦ (az, a/z;q,p)_k / (cz, c/z;q,p)_k`.
pub fn wp_basis(
    a: C64,
    c: C64,
    k: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> SymmetricFunction {
    let (params, policy) = (*params, *policy);
    SymmetricFunction::new(move |z| {
        qp_ratio(&[a * z, a / z], &[c * z, c / z], k as i64, &params, &policy, "basis denominator")
    })
}

/// `Σ_k coeffs[k] (az, a/z)_k / (cz, c/z)_k`, an element of `W_c^n` with `n = coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WcnElement {
    pub coeffs: Vec<C64>,
    pub a: C64,
    pub c: C64,
}

impl WcnElement {
    pub fn new(coeffs: Vec<C64>, a: C64, c: C64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("WcnElement needs at least one coefficient".into()));
        }
        Ok(Self { coeffs, a, c })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
        let mut acc = CompensatedSum::new();
        let mut ratio = C64::new(1.0, 0.0);
        let q = params.q();
        let p = params.p();
        let (mut n1, mut n2, mut d1, mut d2) = (self.a * z, self.a / z, self.c * z, self.c / z);
        for (k, &ck) in self.coeffs.iter().enumerate() {
            if k > 0 {
                ratio *= theta(n1, p, policy)? * theta(n2, p, policy)?;
                ratio /= theta_divisor(d1, p, policy, "basis denominator", k as i64 - 1)?
                    * theta_divisor(d2, p, policy, "basis denominator", k as i64 - 1)?;
                n1 *= q;
                n2 *= q;
                d1 *= q;
                d2 *= q;
            }
            acc.add(ck * ratio);
        }
        Ok(acc.finish())
    }

    pub fn to_function(&self, params: &EllipticParams, policy: &TruncationPolicy) -> SymmetricFunction {
        let (me, params, policy) = (self.clone(), *params, *policy);
        SymmetricFunction::new(move |z| me.eval(z, &params, &policy))
    }
}

/// The factor `2q^{1/2} z θ(cz/q^{1/2}, czq^{1/2}, c/(q^{1/2}z), cq^{1/2}/z) / θ(q, z²)`.
fn d_prefactor(c: C64, z: C64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<C64> {
    let p = params.p();
    let h = params.q_half();
    if lattice_defect(z * z, p) < POLE_TOL {
        return Err(Error::PoleHit {
            context: "operator: theta(z^2)",
            index: 0,
        });
    }
    let num = theta_multi(&[c * z / h, c * z * h, c / (h * z), c * h / z], p, policy)?;
    let den = theta_divisor(params.q(), p, policy, "operator: theta(q)", 0)? * theta(z * z, p, policy)?;
    Ok(C64::new(2.0, 0.0) * h * z * num / den)
}

/// `D_{c,q,p} f`.
pub fn apply_d(
    f: &SymmetricFunction,
    c: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> SymmetricFunction {
    let (f, params, policy) = (f.clone(), *params, *policy);
    SymmetricFunction::new(move |z| {
        let h = params.q_half();
        let pre = d_prefactor(c, z, &params, &policy)?;
        let (ends, k_in) = track_condition(|| Ok::<_, Error>((f.eval(h * z)?, f.eval(z / h)?)));
        let (up, down) = ends?;
        Ok(pre * compounded_difference(up, down, k_in))
    })
}

/// `up - down`, reporting the cancellation compounded with the amplification
/// `k_in` the two inputs already went through, so nested iterates carry the
/// product along the chain.
fn compounded_difference(up: C64, down: C64, k_in: f64) -> C64 {
    let (d, k) = track_condition(|| csum([up, -down]));
    note_condition(k * k_in);
    d
}

/// `D^{(m)}_{c}`: applies `D_c`, then `D_{cq^{3/2}}`, …, `D_{cq^{3(m-1)/2}}`.
pub fn apply_d_iter(
    f: &SymmetricFunction,
    c: C64,
    m: usize,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> SymmetricFunction {
    let mut g = f.clone();
    for i in 0..m {
        g = apply_d(&g, c * params.q_pow_quarter(6 * i as i64), params, policy);
    }
    g
}

/// `D^{(m)}_c f(z)` as one sum over `m+1` values `f(q^{m/2-k} z)`.
pub fn cooper_explicit(
    f: &SymmetricFunction,
    c: C64,
    m: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    if m == 0 {
        return f.eval(z);
    }
    let w = ExplicitWeights::new(c, m, z, params, policy)?;
    let mut acc = CompensatedSum::new();
    for (&wk, &zk) in w.weights.iter().zip(&w.points) {
        acc.add(wk * f.eval(zk)?);
    }
    Ok(w.prefactor * acc.finish())
}

/// Prefactor, weights and evaluation points of the explicit iterate formula in one variable.
struct ExplicitWeights {
    prefactor: C64,
    weights: Vec<C64>,
    points: Vec<C64>,
}

impl ExplicitWeights {
    fn new(c: C64, m: usize, z: C64, params: &EllipticParams, policy: &TruncationPolicy) -> Result<Self> {
        let mi = m as i64;
        let t = |e: i64| params.q_pow_quarter(e);
        let p = params.p();
        if m == 0 {
            return Ok(Self {
                prefactor: C64::new(1.0, 0.0),
                weights: vec![C64::new(1.0, 0.0)],
                points: vec![z],
            });
        }
        let theta_q = theta_divisor(params.q(), p, policy, "explicit iterate: theta(q)", 0)?;
        let prefactor = ipow(C64::new(-2.0, 0.0) * z, mi)
            * t(mi * (3 - mi))
            * qp_fact_multi(&[c * t(2 * mi - 4) * z, c * t(2 * mi - 4) / z], mi + 1, params, policy)?
            / ipow(theta_q, mi);
        let z2 = z * z;
        let mut weights = Vec::with_capacity(m + 1);
        let mut points = Vec::with_capacity(m + 1);
        for k in 0..=mi {
            let num = params.q_pow(k * (mi - k))
                * elliptic_binomial(mi, k, params, policy)?
                * ipow(z, 2 * (k - mi))
                * qp_fact_multi(
                    &[c * t(2 * mi - 4 * k) * z, c * t(4 * k - 2 * mi) / z],
                    mi - 1,
                    params,
                    policy,
                )?;
            let den = qp_denominator(&[params.q_pow(mi - 2 * k + 1) * z2], k, params, policy, "explicit iterate")?
                * qp_denominator(
                    &[params.q_pow(2 * k - mi + 1) / z2],
                    mi - k,
                    params,
                    policy,
                    "explicit iterate",
                )?;
            weights.push(num / den);
            points.push(t(2 * mi - 4 * k) * z);
        }
        Ok(Self {
            prefactor,
            weights,
            points,
        })
    }
}

/// `D_{c,q,p} (az, a/z)_n/(cz, c/z)_n` in closed form:
/// `-2a θ(c/a, acq^{n-1}, q^n)/θ(q) · (aq^{1/2}z, aq^{1/2}/z)_{n-1}/(cq^{3/2}z, cq^{3/2}/z)_{n-1}`.
pub fn degree_lowering(
    a: C64,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    if n == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let ni = n as i64;
    let p = params.p();
    let h = params.q_half();
    let h3 = params.q_pow_quarter(6);
    let lead = C64::new(-2.0, 0.0) * a
        * theta_multi(&[c / a, a * c * params.q_pow(ni - 1), params.q_pow(ni)], p, policy)?
        / theta_divisor(params.q(), p, policy, "degree lowering: theta(q)", 0)?;
    Ok(lead
        * qp_ratio(
            &[a * h * z, a * h / z],
            &[c * h3 * z, c * h3 / z],
            ni - 1,
            params,
            policy,
            "degree lowering",
        )?)
}

/// How far `D^{(n)} f` is from being constant, measured as the relative
/// difference of its values at `q^{±1/2} z`; the next divided difference
/// `D^{(n+1)} f(z)` is this difference times the operator prefactor.
pub fn annihilation_defect(
    f: &SymmetricFunction,
    c: C64,
    n: usize,
    z: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let h = params.q_half();
    let cn = c * params.q_pow_quarter(6 * n as i64);
    // the (n+1)-st step acts with parameter c q^{3n/2}; its prefactor must be finite
    d_prefactor(cn, z, params, policy)?;
    let lhs = cooper_explicit(f, c, n, h * z, params, policy)?;
    let rhs = cooper_explicit(f, c, n, z / h, params, policy)?;
    Ok(relative_residual(lhs, rhs))
}

/// `D_{c,q,p;z_i}` applied to slot `i` of a multivariate function.
pub fn apply_d_var(
    f: &MultiFunction,
    i: usize,
    c: C64,
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<MultiFunction> {
    if i >= f.arity() {
        return Err(Error::InvalidParameter(format!(
            "variable index {i} out of range for arity {}",
            f.arity()
        )));
    }
    let (g, params, policy) = (f.clone(), *params, *policy);
    Ok(MultiFunction::new(f.arity(), move |z| {
        let h = params.q_half();
        let pre = d_prefactor(c, z[i], &params, &policy)?;
        let mut up = z.to_vec();
        let mut down = z.to_vec();
        up[i] *= h;
        down[i] /= h;
        let (ends, k_in) = track_condition(|| Ok::<_, Error>((g.eval(&up)?, g.eval(&down)?)));
        let (fu, fd) = ends?;
        Ok(pre * compounded_difference(fu, fd, k_in))
    }))
}

/// `D^{(k)}_{c;z} = D^{(k_1)}_{c_1;z_1} ⋯ D^{(k_m)}_{c_m;z_m}` (the last variable acts first).
pub fn apply_d_multi(
    f: &MultiFunction,
    c: &[C64],
    k: &[usize],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<MultiFunction> {
    if c.len() != f.arity() || k.len() != f.arity() {
        return Err(Error::InvalidParameter(
            "operator parameters must match the number of variables".into(),
        ));
    }
    let mut g = f.clone();
    for i in (0..f.arity()).rev() {
        for j in 0..k[i] {
            g = apply_d_var(&g, i, c[i] * params.q_pow_quarter(6 * j as i64), params, policy)?;
        }
    }
    Ok(g)
}

/// `D^{(n)}_{c;z} f(z)` via the explicit formula applied in every variable:
/// one nested sum over `∏(n_i + 1)` values of `f`.
pub fn cooper_explicit_multi(
    f: &MultiFunction,
    c: &[C64],
    n: &[usize],
    z: &[C64],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let m = f.arity();
    if c.len() != m || n.len() != m || z.len() != m {
        return Err(Error::InvalidParameter(
            "operator parameters must match the number of variables".into(),
        ));
    }
    let per_var: Vec<ExplicitWeights> = (0..m)
        .map(|i| ExplicitWeights::new(c[i], n[i], z[i], params, policy))
        .collect::<Result<_>>()?;
    let prefactor: C64 = per_var.iter().map(|w| w.prefactor).product();
    let mut acc = CompensatedSum::new();
    let mut point = vec![C64::new(0.0, 0.0); m];
    for idx in MultiIndex::new(n) {
        let mut weight = C64::new(1.0, 0.0);
        for (i, &ki) in idx.iter().enumerate() {
            weight *= per_var[i].weights[ki];
            point[i] = per_var[i].points[ki];
        }
        acc.add(weight * f.eval(&point)?);
    }
    Ok(prefactor * acc.finish())
}

/// Iterator over all `k` with `0 ≤ k_i ≤ n_i`, first index fastest.
#[derive(Debug, Clone)]
pub struct MultiIndex {
    bounds: Vec<usize>,
    cur: Option<Vec<usize>>,
}

impl MultiIndex {
    pub fn new(bounds: &[usize]) -> Self {
        Self {
            bounds: bounds.to_vec(),
            cur: Some(vec![0; bounds.len()]),
        }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == next.len() {
                self.cur = None;
                break;
            }
            if next[i] < self.bounds[i] {
                next[i] += 1;
                self.cur = Some(next);
                break;
            }
            next[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::c64;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn pr() -> EllipticParams {
        EllipticParams::new(c64(0.87, 0.11), c64(0.76, 0.19)).unwrap()
    }

    fn element(n: usize) -> WcnElement {
        let coeffs = (0..=n)
            .map(|k| c64(0.3 + 0.2 * k as f64, -0.5 + 0.37 * k as f64))
            .collect();
        WcnElement::new(coeffs, c64(0.62, -0.41), c64(0.83, 0.52)).unwrap()
    }

    const Z: C64 = C64 { re: 0.91, im: 0.37 };

    #[test]
    fn constants_are_annihilated() {
        let params = pr();
        let g = apply_d(&SymmetricFunction::constant(c64(2.5, -1.0)), c64(0.7, 0.2), &params, &pol());
        assert_eq!(g.eval(Z).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn degree_lowering_closed_form() {
        let params = pr();
        let (a, c) = (c64(0.62, -0.41), c64(0.83, 0.52));
        for n in 0..5 {
            let lhs = apply_d(&wp_basis(a, c, n, &params, &pol()), c, &params, &pol()).eval(Z).unwrap();
            let rhs = degree_lowering(a, c, n, Z, &params, &pol()).unwrap();
            if n == 0 {
                assert_eq!(lhs, c64(0.0, 0.0));
            } else {
                assert!(relative_residual(lhs, rhs) < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn classical_limit_lowers_degree() {
        // p = 0, c = 0: D (az, a/z;q)_n = -2a (1-q^n)/(1-q) (aq^{1/2}z, aq^{1/2}/z;q)_{n-1}
        let params = EllipticParams::basic(c64(0.88, 0.1)).unwrap();
        let (a, n) = (c64(0.6, 0.3), 3usize);
        let q = params.q();
        let one = c64(1.0, 0.0);
        let f = wp_basis(a, c64(0.0, 0.0), n, &params, &pol());
        let lhs = apply_d(&f, c64(0.0, 0.0), &params, &pol()).eval(Z).unwrap();
        let h = params.q_half();
        let mut tail = one;
        for j in 0..n as i64 - 1 {
            tail *= (one - a * h * Z * ipow(q, j)) * (one - a * h / Z * ipow(q, j));
        }
        let rhs = c64(-2.0, 0.0) * a * (one - ipow(q, n as i64)) / (one - q) * tail;
        assert!(relative_residual(lhs, rhs) < 1e-12);
    }

    #[test]
    fn iterate_edge_cases() {
        let params = pr();
        let f = element(3).to_function(&params, &pol());
        let c = c64(0.83, 0.52);
        assert_eq!(apply_d_iter(&f, c, 0, &params, &pol()).eval(Z).unwrap(), f.eval(Z).unwrap());
        assert_eq!(
            apply_d_iter(&f, c, 1, &params, &pol()).eval(Z).unwrap(),
            apply_d(&f, c, &params, &pol()).eval(Z).unwrap()
        );
        assert_eq!(cooper_explicit(&f, c, 0, Z, &params, &pol()).unwrap(), f.eval(Z).unwrap());
    }

    #[test]
    fn explicit_matches_recursive() {
        let params = pr();
        let el = element(5);
        let f = el.to_function(&params, &pol());
        for m in 1..=5 {
            let rec = apply_d_iter(&f, el.c, m, &params, &pol()).eval(Z).unwrap();
            let exp = cooper_explicit(&f, el.c, m, Z, &params, &pol()).unwrap();
            assert!(relative_residual(rec, exp) < 1e-10, "m={m}");
        }
    }

    #[test]
    fn explicit_single_step_is_the_definition() {
        let params = pr();
        let el = element(2);
        let f = el.to_function(&params, &pol());
        let a = apply_d(&f, el.c, &params, &pol()).eval(Z).unwrap();
        let b = cooper_explicit(&f, el.c, 1, Z, &params, &pol()).unwrap();
        assert!(relative_residual(a, b) < 1e-13);
    }

    #[test]
    fn annihilation_beyond_degree() {
        let params = pr();
        let el = element(3);
        let f = el.to_function(&params, &pol());
        assert!(annihilation_defect(&f, el.c, 3, Z, &params, &pol()).unwrap() < 1e-9);
        // one degree short, the difference is O(1)
        assert!(annihilation_defect(&f, el.c, 2, Z, &params, &pol()).unwrap() > 1e-3);
    }

    #[test]
    fn operator_preserves_symmetry() {
        let params = pr();
        let el = element(4);
        let g = apply_d(&el.to_function(&params, &pol()), el.c, &params, &pol());
        let probes: Vec<C64> = (0..50)
            .map(|j| C64::from_polar(0.5 + j as f64 / 50.0, 0.13 * j as f64 + 0.05))
            .collect();
        assert!(g.symmetry_defect(&probes).unwrap() < 1e-10);
    }

    #[test]
    fn basis_symmetry_and_quasi_periodicity() {
        let params = pr();
        let (a, c) = (c64(0.62, -0.41), c64(0.83, 0.52));
        assert_eq!(wp_basis(a, c, 0, &params, &pol()).eval(Z).unwrap(), c64(1.0, 0.0));
        let f = wp_basis(a, c, 3, &params, &pol());
        assert!(f.symmetry_defect(&[Z, c64(1.3, -0.2)]).unwrap() < 1e-12);
        // numerator g(z) = (az, a/z)_k satisfies g(pz) p^k z^{2k} = g(z); the quotient is p-periodic
        let p = params.p();
        let g = |z: C64| qp_fact_multi(&[a * z, a / z], 3, &params, &pol()).unwrap();
        assert!(relative_residual(g(p * Z) * ipow(p, 3) * ipow(Z, 6), g(Z)) < 1e-11);
        assert!(relative_residual(f.eval(p * Z).unwrap(), f.eval(Z).unwrap()) < 1e-11);
    }

    #[test]
    fn pole_at_lattice() {
        let params = pr();
        let f = element(1).to_function(&params, &pol());
        let g = apply_d(&f, c64(0.5, 0.0), &params, &pol());
        assert!(matches!(g.eval(c64(1.0, 0.0)), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn multi_index_enumeration() {
        let all: Vec<_> = MultiIndex::new(&[1, 2]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![1, 0]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(MultiIndex::new(&[]).count(), 1);
    }

    #[test]
    fn multivariate_operator() {
        let params = pr();
        let (a1, c1) = (c64(0.62, -0.41), c64(0.83, 0.52));
        let (a2, c2) = (c64(-0.7, 0.35), c64(0.55, -0.9));
        let f = MultiFunction::separable(vec![
            wp_basis(a1, c1, 2, &params, &pol()),
            wp_basis(a2, c2, 3, &params, &pol()),
        ]);
        let z = [Z, c64(1.1, -0.45)];
        let c = [c1, c2];
        assert_eq!(
            apply_d_multi(&f, &c, &[0, 0], &params, &pol()).unwrap().eval(&z).unwrap(),
            f.eval(&z).unwrap()
        );
        // single-variable step against the factorized closed form
        let g = apply_d_multi(&f, &c, &[1, 0], &params, &pol()).unwrap().eval(&z).unwrap();
        let oracle = degree_lowering(a1, c1, 2, z[0], &params, &pol()).unwrap()
            * wp_basis(a2, c2, 3, &params, &pol()).eval(z[1]).unwrap();
        assert!(relative_residual(g, oracle) < 1e-10);
        // commutation of the per-variable operators
        let d1 = apply_d_var(&f, 0, c1, &params, &pol()).unwrap();
        let d12 = apply_d_var(&d1, 1, c2, &params, &pol()).unwrap();
        let d2 = apply_d_var(&f, 1, c2, &params, &pol()).unwrap();
        let d21 = apply_d_var(&d2, 0, c1, &params, &pol()).unwrap();
        assert!(relative_residual(d12.eval(&z).unwrap(), d21.eval(&z).unwrap()) < 1e-10);
        // explicit multivariate formula against recursion
        let n = [2, 2];
        let rec = apply_d_multi(&f, &c, &n, &params, &pol()).unwrap().eval(&z).unwrap();
        let exp = cooper_explicit_multi(&f, &c, &n, &z, &params, &pol()).unwrap();
        assert!(relative_residual(rec, exp) < 1e-9);
    }
}
