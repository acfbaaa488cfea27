//! The registered identities: samplers plus both sides.

use super::{Check, Identity, ParamValue, Sampler};
use crate::cubic::{
    cooper_toh_first_sides, cooper_toh_second_sides, cubic_gessel_stanton_lhs, cubic_gessel_stanton_rhs,
    cubic_jackson_lhs, cubic_jackson_rhs, cubic_km_lhs, cubic_km_mixed_lhs, cubic_km_mixed_rhs, cubic_km_rhs,
    degeneration_check, gamma, gamma_double_loop, gamma_functional_eq_sides, gamma_splitting_sides,
    gamma_symmetry_sides, CubicFamily, DegenerationStudy,
};
use crate::error::Result;
use crate::expansion::{
    interpolate, interpolate_multi, interpolation_prefactor, interpolation_prefactor_multi, km_12v11_lhs,
    km_12v11_rhs, km_multi_lhs, km_multi_rhs, km_multi_theta_lhs, km_multi_theta_rhs, km_theta_lhs, km_theta_rhs,
    pseudo_quadratic_closed_form, pseudo_quadratic_lhs, pseudo_quadratic_series, quadratic_summation_lhs,
    quadratic_summation_rhs, quadratic_taylor_coeffs, reconstruct_multi, taylor_coeffs, taylor_coeffs_multi,
    wp_expansion_coefficient, KarlssonMintonConfig, MultivarConfig, PairFactor, PairPower,
};
use crate::operator::{
    apply_d_iter, apply_d_multi, cooper_explicit, cooper_explicit_multi, wp_basis, MultiFunction, WcnElement,
};
use crate::params::{ipow, EllipticParams, TruncationPolicy, C64};
use crate::pochhammer::qp_ratio;
use crate::sum::{csum, note_condition, track_condition};
use crate::series::{ft_rhs, jackson_8phi7_sides, vwp_sum, BalancedQuintuple, VwpSpec};
use crate::theta::{theta, theta_multi};

type Pairs = Result<Vec<(C64, C64)>>;

fn equality(
    id: &'static str,
    anchor: &'static str,
    summary: &'static str,
    default_trials: usize,
    tolerance: f64,
    f: super::PairsFn,
) -> Identity {
    Identity {
        id,
        anchor,
        summary,
        default_trials,
        tolerance,
        check: Check::Equality(f),
    }
}

/// Every identity the harness knows about, in registration order.
pub fn registry() -> Vec<Identity> {
    vec![
        equality(
            "frenkel-turaev-10v9",
            "Frenkel-Turaev 10V9 summation",
            "a, b, c, d free; e from the balancing condition; n in 0..=6",
            200,
            1e-9,
            frenkel_turaev,
        ),
        equality(
            "jackson-8phi7",
            "Jackson's terminating 8phi7 summation (p = 0)",
            "a, b, c, d free; p = 0; n in 0..=6",
            200,
            1e-11,
            jackson,
        ),
        equality(
            "taylor-10v9-example",
            "well-poised monomial expanded in the well-poised basis (10V9 via Taylor coefficients)",
            "a, b, c, z free; n in 0..=5",
            100,
            1e-9,
            taylor_10v9_example,
        ),
        equality(
            "cooper-explicit-vs-recursive",
            "explicit formula for iterates of the elliptic Askey-Wilson operator",
            "random f in W_c^n, n in 1..=5, m in 1..=n; annihilation of D^(n) f",
            100,
            1e-9,
            cooper_explicit_vs_recursive,
        ),
        equality(
            "taylor-expansion",
            "elliptic Taylor expansion in the well-poised basis",
            "random f in W_c^n, n in 0..=5; reconstruction at a random z",
            100,
            1e-9,
            taylor_expansion,
        ),
        equality(
            "interpolation",
            "elliptic interpolation formula on the nodes a q^k",
            "random f in W_c^n, n in 0..=5",
            100,
            1e-9,
            interpolation,
        ),
        equality(
            "km-12v11",
            "elliptic Karlsson-Minton type 12V11 identity",
            "a, b, d, z free; n in 0..=6; s in 0..=n",
            100,
            1e-9,
            km_12v11,
        ),
        equality(
            "km-theta-products",
            "Karlsson-Minton type identity with theta-function products",
            "a, z free; b_1..b_n free with n in 0..=6",
            100,
            1e-9,
            km_theta_products,
        ),
        equality(
            "multivar-taylor",
            "multivariable elliptic Taylor expansion",
            "m in 2..=3; n_i in 1..=3; f a sum of two separable products",
            50,
            1e-8,
            multivar_taylor,
        ),
        equality(
            "multivar-explicit-operator",
            "multivariable explicit formula for operator iterates",
            "m in 2..=3; n_i in 1..=3; k_i in 0..=n_i",
            50,
            1e-8,
            multivar_explicit_operator,
        ),
        equality(
            "multivar-interpolation",
            "multivariable elliptic interpolation formula",
            "m in 2..=3; n_i in 1..=3",
            50,
            1e-8,
            multivar_interpolation,
        ),
        equality(
            "multivar-km",
            "multivariable elliptic Karlsson-Minton type identity",
            "m in 2..=3; small random shape with n_i <= 3",
            50,
            1e-8,
            multivar_km,
        ),
        equality(
            "multivar-km-theta-form",
            "multivariable Karlsson-Minton identity, theta-product form",
            "m in 2..=3; unit exponents with n_i <= 3",
            50,
            1e-8,
            multivar_km_theta_form,
        ),
        equality(
            "quadratic-taylor",
            "elliptic Taylor expansion in the quadratic basis",
            "random f in W_c^n, n in 0..=5",
            100,
            1e-9,
            quadratic_taylor,
        ),
        equality(
            "warnaar-gessel-stanton",
            "quadratic summation of Warnaar (elliptic Gessel-Stanton)",
            "a, c, z free; n in 0..=6",
            100,
            1e-9,
            warnaar_gessel_stanton,
        ),
        equality(
            "remark-pseudo-quadratic",
            "pseudo-quadratic 10V9 expansion and its Frenkel-Turaev evaluation",
            "a, c, z free; n in 0..=6",
            100,
            1e-9,
            remark_pseudo_quadratic,
        ),
        equality(
            "cubic-jackson-1",
            "first cubic theta extension of Jackson's summation",
            "a, b, c, z free; n in 0..=5",
            100,
            1e-8,
            cubic_jackson_1,
        ),
        equality(
            "cubic-km",
            "Karlsson-Minton type identities with cubic theta functions",
            "a, b, z free; n in 0..=5; mixed form with #b + #d in 1..=4",
            100,
            1e-8,
            cubic_km,
        ),
        equality(
            "cubic-gessel-stanton-1",
            "first cubic theta extension of Gessel and Stanton's summation",
            "a, c, z free; n in 0..=5",
            100,
            1e-8,
            cubic_gessel_stanton_1,
        ),
        equality(
            "cubic-jackson-2",
            "second cubic theta extension of Jackson's summation",
            "a, b, c, z free; n in 0..=5",
            100,
            1e-8,
            cubic_jackson_2,
        ),
        equality(
            "cubic-gessel-stanton-2",
            "second cubic theta extension of Gessel and Stanton's summation",
            "a, c, z free; n in 0..=5",
            100,
            1e-8,
            cubic_gessel_stanton_2,
        ),
        Identity {
            id: "degeneration-first",
            anchor: "p -> 0 limit of the first cubic factorial",
            summary: "a, z, q free; n in 1..=4; p in {1e-3, 1e-4, 1e-5}; ratios in [3, 30]",
            default_trials: 50,
            tolerance: 1.0,
            check: Check::Convergence {
                run: degeneration_first,
                ratio_band: Some((3.0, 30.0)),
            },
        },
        Identity {
            id: "degeneration-second",
            anchor: "p -> 0 limit of the second cubic factorial",
            summary: "a, z, q free; n in 1..=4; p in {1e-3, 1e-4, 1e-5}; empirical order reported",
            default_trials: 50,
            tolerance: 1.0,
            check: Check::Convergence {
                run: degeneration_second,
                ratio_band: None,
            },
        },
        equality(
            "theta-structural",
            "theta function inversion, p-shift and Weierstrass addition formula",
            "x, y, u, v free; |p| in [0.05, 0.5]",
            200,
            1e-10,
            theta_structural,
        ),
        equality(
            "gamma-structural",
            "cubic theta function symmetries, functional equation, splittings and Cooper-Toh formulae",
            "z, a free; lambda, mu in -2..=2; |p| in [0.05, 0.5]",
            200,
            1e-9,
            gamma_structural,
        ),
        equality(
            "gamma-series-oracle",
            "cubic theta function lattice sum against a plain double loop",
            "z, a free; |p| in [0.05, 0.5]; oracle box |k|, |l| <= 40",
            200,
            1e-12,
            gamma_series_oracle,
        ),
    ]
}

// ---------------------------------------------------------------------------
// helpers

fn max_n(s: &Sampler) -> usize {
    s.ranges.max_n
}

/// `n` in `0..=min(cap, max_n)`.
fn degree(s: &mut Sampler, cap: usize) -> usize {
    let hi = cap.min(max_n(s));
    s.degree("n", 0, hi)
}

/// A random element of `W_c^n` with free `a`, `c` and coefficients.
fn random_element(s: &mut Sampler, name: &str, n: usize) -> WcnElement {
    let coeffs = s.complexes(&format!("{name}.coeffs"), n + 1);
    let a = s.complex(&format!("{name}.a"));
    let c = s.complex(&format!("{name}.c"));
    WcnElement { coeffs, a, c }
}

fn multi_degrees(s: &mut Sampler) -> (usize, Vec<usize>) {
    let m = s.degree("m", 2, s.ranges.max_m.max(2));
    let hi = s.ranges.max_n_multi.max(1);
    let n: Vec<usize> = (0..m).map(|_| s.rng_degree(1, hi)).collect();
    s.record("n", ParamValue::List(n.iter().map(|&k| C64::new(k as f64, 0.0)).collect()));
    (m, n)
}

/// `Σ_r ∏_i e_{r,i}(z_i)` with `e_{r,i}` random in `W_{c_i}^{n_i}`.
fn random_multi(
    s: &mut Sampler,
    c: &[C64],
    n: &[usize],
    params: &EllipticParams,
    policy: &TruncationPolicy,
) -> MultiFunction {
    let parts: Vec<Vec<WcnElement>> = (0..2)
        .map(|r| {
            (0..c.len())
                .map(|i| {
                    let coeffs = s.complexes(&format!("f{r}.{i}.coeffs"), n[i] + 1);
                    let a = s.complex(&format!("f{r}.{i}.a"));
                    WcnElement { coeffs, a, c: c[i] }
                })
                .collect()
        })
        .collect();
    let (params, policy) = (*params, *policy);
    MultiFunction::new(c.len(), move |z| {
        let mut acc = C64::new(0.0, 0.0);
        for row in &parts {
            let mut prod = C64::new(1.0, 0.0);
            for (e, &zi) in row.iter().zip(z) {
                prod *= e.eval(zi, &params, &policy)?;
            }
            acc += prod;
        }
        Ok(acc)
    })
}

// ---------------------------------------------------------------------------
// very-well-poised summations

fn frenkel_turaev(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, b, c, d] = [s.complex("a"), s.complex("b"), s.complex("c"), s.complex("d")];
    let n = degree(s, 6);
    let q5 = BalancedQuintuple::solve(a, b, c, d, n, params.q())?;
    let lhs = vwp_sum(&q5.spec_10v9(&params)?, &params, policy)?;
    Ok(vec![(lhs, ft_rhs(&q5, &params, policy)?)])
}

fn jackson(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.basic_params()?;
    let [a, b, c, d] = [s.complex("a"), s.complex("b"), s.complex("c"), s.complex("d")];
    let n = degree(s, 6);
    let q5 = BalancedQuintuple::solve(a, b, c, d, n, params.q())?;
    let classical = jackson_8phi7_sides(&q5, params.q())?;
    let series = vwp_sum(&q5.spec_10v9(&params)?, &params, policy)?;
    Ok(vec![classical, (series, ft_rhs(&q5, &params, policy)?)])
}

fn taylor_10v9_example(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, b, c, z] = [s.complex("a"), s.complex("b"), s.complex("c"), s.complex("z")];
    let n = degree(s, 5);
    let f = wp_basis(b, c, n, &params, policy);
    let tc = taylor_coeffs(&f, a, c, n, &params, policy)?;
    let mut out = Vec::with_capacity(n + 2);
    for k in 0..=n {
        out.push((tc.f_k[k], wp_expansion_coefficient(a, b, c, n, k, &params, policy)?));
    }
    let q = params.q();
    let ni = n as i64;
    let lhs = qp_ratio(&[a * c, c / a, b * z, b / z], &[a * b, b / a, c * z, c / z], ni, &params, policy, "10V9 example")?;
    let spec = VwpSpec::new(a * c / q, vec![a * z, a / z, c / b, b * c * params.q_pow(ni - 1), params.q_pow(-ni)], n, &params)?;
    out.push((lhs, vwp_sum(&spec, &params, policy)?));
    Ok(out)
}

// ---------------------------------------------------------------------------
// one-variable operator, Taylor and interpolation

fn cooper_explicit_vs_recursive(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let n = s.degree("n", 1, 5.min(max_n(s)).max(1));
    let m = s.degree("m", 1, n);
    let el = random_element(s, "f", n);
    let z = s.complex("z");
    let f = el.to_function(&params, policy);
    let rec = apply_d_iter(&f, el.c, m, &params, policy).eval(z)?;
    let exp = cooper_explicit(&f, el.c, m, z, &params, policy)?;
    // D^(n) f is constant, so the next difference vanishes
    let h = params.q_half();
    let up = cooper_explicit(&f, el.c, n, h * z, &params, policy)?;
    let down = cooper_explicit(&f, el.c, n, z / h, &params, policy)?;
    Ok(vec![(rec, exp), (up, down)])
}

/// Runs `second` on the output of `first` and reports the product of their
/// condition numbers: errors amplified by the first stage are amplified again.
fn staged<A, B>(first: impl FnOnce() -> Result<A>, second: impl FnOnce(&A) -> Result<B>) -> Result<B> {
    let (a, k1) = track_condition(first);
    let a = a?;
    let (b, k2) = track_condition(|| second(&a));
    note_condition(k1 * k2);
    b
}

fn taylor_expansion(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let n = degree(s, 5);
    let el = random_element(s, "f", n);
    let [a, z] = [s.complex("a"), s.complex("z")];
    let f = el.to_function(&params, policy);
    let rebuilt = staged(
        || taylor_coeffs(&f, a, el.c, n, &params, policy),
        |tc| tc.reconstruct(z, &params, policy),
    )?;
    Ok(vec![(rebuilt, f.eval(z)?)])
}

fn interpolation(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let n = degree(s, 5);
    let el = random_element(s, "f", n);
    let [a, z] = [s.complex("a"), s.complex("z")];
    let f = el.to_function(&params, policy);
    let lhs = interpolation_prefactor(a, el.c, n, z, &params, policy)? * f.eval(z)?;
    Ok(vec![(lhs, interpolate(&f, a, el.c, n, z, &params, policy)?)])
}

fn km_12v11(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, b, d, z] = [s.complex("a"), s.complex("b"), s.complex("d"), s.complex("z")];
    let n = degree(s, 6);
    let sh = s.degree("s", 0, n);
    Ok(vec![(
        km_12v11_lhs(a, b, d, n, sh, z, &params, policy)?,
        km_12v11_rhs(a, b, d, n, sh, z, &params, policy)?,
    )])
}

fn km_theta_products(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, z] = [s.complex("a"), s.complex("z")];
    let n = degree(s, 6);
    let b = s.complexes("b", n);
    Ok(vec![(
        km_theta_lhs(a, &b, z, &params, policy)?,
        km_theta_rhs(a, &b, z, false, &params, policy)?,
    )])
}

// ---------------------------------------------------------------------------
// several variables

fn multivar_setup(
    s: &mut Sampler,
    policy: &TruncationPolicy,
) -> Result<(EllipticParams, MultivarConfig, MultiFunction, Vec<C64>)> {
    let params = s.params()?;
    let (m, n) = multi_degrees(s);
    let a = s.complexes("a", m);
    let c = s.complexes("c", m);
    let z = s.complexes("z", m);
    let f = random_multi(s, &c, &n, &params, policy);
    Ok((params, MultivarConfig::new(a, c, n)?, f, z))
}

fn multivar_taylor(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let (params, cfg, f, z) = multivar_setup(s, policy)?;
    let rebuilt = staged(
        || taylor_coeffs_multi(&f, &cfg, &params, policy),
        |coeffs| reconstruct_multi(coeffs, &cfg, &z, &params, policy),
    )?;
    Ok(vec![(rebuilt, f.eval(&z)?)])
}

fn multivar_explicit_operator(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let (params, cfg, f, z) = multivar_setup(s, policy)?;
    let k: Vec<usize> = cfg.n.iter().map(|&ni| s.rng_degree(0, ni)).collect();
    s.record("k", ParamValue::List(k.iter().map(|&x| C64::new(x as f64, 0.0)).collect()));
    let rec = apply_d_multi(&f, &cfg.c, &k, &params, policy)?.eval(&z)?;
    Ok(vec![(rec, cooper_explicit_multi(&f, &cfg.c, &k, &z, &params, policy)?)])
}

fn multivar_interpolation(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let (params, cfg, f, z) = multivar_setup(s, policy)?;
    let lhs = interpolation_prefactor_multi(&cfg, &z, &params, policy)? * f.eval(&z)?;
    Ok(vec![(lhs, interpolate_multi(&f, &cfg, &z, &params, policy)?)])
}

/// A small random Karlsson-Minton shape, redrawn until every `n_i <= max_n_multi`.
fn km_shape(s: &mut Sampler, theta_form: bool) -> KarlssonMintonConfig {
    let m = s.degree("m", 2, s.ranges.max_m.max(2));
    let cap = s.ranges.max_n_multi.max(1);
    loop {
        let mut b = Vec::with_capacity(m);
        let mut v = Vec::with_capacity(m);
        for _ in 0..m {
            let len = s.rng_degree(0, 2);
            let bi: Vec<C64> = (0..len).map(|_| s.draw_complex()).collect();
            let vi: Vec<usize> = (0..len).map(|_| if theta_form { 1 } else { s.rng_degree(1, 2) }).collect();
            b.push(bi);
            v.push(vi);
        }
        let mut w = Vec::new();
        let mut pairs = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let wij = s.rng_degree(0, 1);
                if wij > 0 {
                    w.push((i, j, wij));
                }
                if s.rng_degree(0, 2) == 0 {
                    let alpha = s.draw_complex();
                    pairs.push(PairFactor { i, j, alpha, u: 1 });
                }
            }
        }
        let cfg = KarlssonMintonConfig { m, b, v, w, pairs };
        let n = cfg.degrees();
        if n.iter().all(|&k| k <= cap) && n.iter().any(|&k| k > 0) {
            s.record("shape", ParamValue::Text(format!("{:?} w={:?}", cfg.v, cfg.w)));
            s.record("b", ParamValue::List(cfg.b.iter().flatten().copied().collect()));
            s.record("alpha", ParamValue::List(cfg.pairs.iter().map(|pf| pf.alpha).collect()));
            return cfg;
        }
    }
}

fn multivar_km(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let cfg = km_shape(s, false);
    let a = s.complexes("a", cfg.m);
    let z = s.complexes("z", cfg.m);
    let c = s.complexes("c", cfg.m);
    let lhs = km_multi_lhs(&cfg, &a, &z, &params, policy)?;
    let rhs = km_multi_rhs(&cfg, &a, &z, PairPower::Derived, &params, policy)?;
    // the same identity through the generic interpolation formula
    let f = crate::expansion::km_multi_function(&cfg, &c, &params, policy)?;
    let mcfg = MultivarConfig::new(a, c, cfg.degrees())?;
    let ilhs = interpolation_prefactor_multi(&mcfg, &z, &params, policy)? * f.eval(&z)?;
    let irhs = interpolate_multi(&f, &mcfg, &z, &params, policy)?;
    Ok(vec![(lhs, rhs), (ilhs, irhs)])
}

fn multivar_km_theta_form(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let cfg = km_shape(s, true);
    let a = s.complexes("a", cfg.m);
    let z = s.complexes("z", cfg.m);
    Ok(vec![(
        km_multi_theta_lhs(&cfg, &a, &z, &params, policy)?,
        km_multi_theta_rhs(&cfg, &a, &z, PairPower::Derived, &params, policy)?,
    )])
}

// ---------------------------------------------------------------------------
// quadratic basis

fn quadratic_taylor(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let n = degree(s, 5);
    let el = random_element(s, "f", n);
    let z = s.complex("z");
    let f = el.to_function(&params, policy);
    let rebuilt = staged(
        || quadratic_taylor_coeffs(&f, el.c, n, &params, policy),
        |tc| tc.reconstruct(z, &params, policy),
    )?;
    Ok(vec![(rebuilt, f.eval(z)?)])
}

fn warnaar_gessel_stanton(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, c, z] = [s.complex("a"), s.complex("c"), s.complex("z")];
    let n = degree(s, 6);
    Ok(vec![(
        quadratic_summation_lhs(a, c, n, z, &params, policy)?,
        quadratic_summation_rhs(a, c, n, z, &params, policy)?,
    )])
}

fn remark_pseudo_quadratic(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, c, z] = [s.complex("a"), s.complex("c"), s.complex("z")];
    let n = degree(s, 6);
    let series = pseudo_quadratic_series(a, c, n, z, &params, policy)?;
    Ok(vec![
        (pseudo_quadratic_lhs(a, c, n, z, &params, policy)?, series),
        (series, pseudo_quadratic_closed_form(a, c, n, z, &params, policy)?),
    ])
}

// ---------------------------------------------------------------------------
// cubic theta functions

fn cubic_jackson(s: &mut Sampler, family: CubicFamily, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, b, c, z] = [s.complex("a"), s.complex("b"), s.complex("c"), s.complex("z")];
    let n = degree(s, 5);
    Ok(vec![(
        cubic_jackson_lhs(family, a, b, c, z, n, &params, policy)?,
        cubic_jackson_rhs(family, a, b, c, z, n, &params, policy)?,
    )])
}

fn cubic_jackson_1(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    cubic_jackson(s, CubicFamily::First, policy)
}

fn cubic_jackson_2(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    cubic_jackson(s, CubicFamily::Second, policy)
}

fn cubic_gessel_stanton(s: &mut Sampler, family: CubicFamily, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, c, z] = [s.complex("a"), s.complex("c"), s.complex("z")];
    let n = degree(s, 5);
    Ok(vec![(
        cubic_gessel_stanton_lhs(family, a, c, z, n, &params, policy)?,
        cubic_gessel_stanton_rhs(family, a, c, z, n, &params, policy)?,
    )])
}

fn cubic_gessel_stanton_1(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    cubic_gessel_stanton(s, CubicFamily::First, policy)
}

fn cubic_gessel_stanton_2(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    cubic_gessel_stanton(s, CubicFamily::Second, policy)
}

fn cubic_km(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let params = s.params()?;
    let [a, b, z] = [s.complex("a"), s.complex("b"), s.complex("z")];
    let n = degree(s, 5);
    let plain = (cubic_km_lhs(a, b, z, n, &params, policy)?, cubic_km_rhs(a, b, z, n, &params, policy)?);
    let total = s.degree("mixed", 1, 4);
    let nd = s.degree("mixed.d", 1, total);
    let bs = s.complexes("mixed.b", total - nd);
    let ds = s.complexes("mixed.d_params", nd);
    let mixed = (
        cubic_km_mixed_lhs(a, &bs, &ds, z, &params, policy)?,
        cubic_km_mixed_rhs(a, &bs, &ds, z, &params, policy)?,
    );
    Ok(vec![plain, mixed])
}

const DEGENERATION_GRID: [f64; 3] = [1e-3, 1e-4, 1e-5];

fn degeneration(s: &mut Sampler, family: CubicFamily, policy: &TruncationPolicy) -> Result<DegenerationStudy> {
    let [a, z] = [s.complex("a"), s.complex("z")];
    let q = s.complex_in("q", s.ranges.q_modulus);
    let n = s.degree("n", 1, 4);
    degeneration_check(family, a, z, q, n, &DEGENERATION_GRID, policy)
}

fn degeneration_first(s: &mut Sampler, policy: &TruncationPolicy) -> Result<DegenerationStudy> {
    degeneration(s, CubicFamily::First, policy)
}

fn degeneration_second(s: &mut Sampler, policy: &TruncationPolicy) -> Result<DegenerationStudy> {
    degeneration(s, CubicFamily::Second, policy)
}

// ---------------------------------------------------------------------------
// structural checks

fn theta_structural(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let sr = s.nome_root_in("s", s.ranges.p_modulus);
    let p = ipow(sr, 6);
    let [x, y, u, v] = [s.complex("x"), s.complex("y"), s.complex("u"), s.complex("v")];
    let inversion = (theta(x.inv(), p, policy)?, -theta(x, p, policy)? / x);
    let shift = (theta(p * x, p, policy)?, theta(x.inv(), p, policy)?);
    let t1 = theta_multi(&[x * y, x / y, u * v, u / v], p, policy)?;
    let t2 = theta_multi(&[x * v, x / v, u * y, u / y], p, policy)?;
    let t3 = u / y * theta_multi(&[y * v, y / v, x * u, x / u], p, policy)?;
    Ok(vec![inversion, shift, (t1, csum([t2, t3]))])
}

fn gamma_structural(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let sr = s.nome_root_in("s", s.ranges.p_modulus);
    let p = ipow(sr, 6);
    let [z, a] = [s.complex("z"), s.complex("a")];
    let lambda = s.int("lambda", -2, 2);
    let mu = s.int("mu", -2, 2);
    let [z2, z3, alpha] = [s.complex("z2"), s.complex("z3"), s.complex("alpha")];
    let mut out: Vec<(C64, C64)> = gamma_symmetry_sides(z, a, p, policy)?.to_vec();
    out.push(gamma_functional_eq_sides(z, a, sr, lambda, mu, policy)?);
    out.extend(gamma_splitting_sides(z, a, sr, policy)?);
    out.push(cooper_toh_first_sides(z, z2, z3, alpha, p, policy)?);
    out.push(cooper_toh_second_sides(z, a, z2, z3, sr, policy)?);
    Ok(out)
}

fn gamma_series_oracle(s: &mut Sampler, policy: &TruncationPolicy) -> Pairs {
    let sr = s.nome_root_in("s", s.ranges.p_modulus);
    let p = ipow(sr, 6);
    let [z, a] = [s.complex("z"), s.complex("a")];
    Ok(vec![(gamma(z, a, p, policy)?, gamma_double_loop(z, a, p, 40))])
}
