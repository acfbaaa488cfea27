//! Base/nome parameters and truncation control.
//!
//! Every fractional power of the base `q` and the nome `p` used anywhere in the
//! crate is an integer power of one of two primitives: `t` with `q = t^4` and
//! `s` with `p = s^6`. No code path takes an independent root of `q` or `p`, so
//! `q^{1/2}`, `q^{1/4}`, `p^{1/2}` and `p^{1/3}` always live on one branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest admissible nome modulus. Accuracy degrades noticeably above 0.9.
pub const MAX_NOME_MODULUS: f64 = 0.99;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Integer power by repeated squaring; `x^0 = 1` also for `x = 0`.
#[inline]
pub fn ipow(x: C64, e: i64) -> C64 {
    if e == 0 {
        return C64::new(1.0, 0.0);
    }
    if e < 0 {
        return C64::new(1.0, 0.0) / ipow(x, -e);
    }
    let mut base = x;
    let mut acc = C64::new(1.0, 0.0);
    let mut k = e as u64;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// The base and nome, stored through their primitive roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticParams {
    /// `q = t^4`.
    pub t: C64,
    /// `p = s^6`.
    pub s: C64,
}

impl EllipticParams {
    pub fn new(t: C64, s: C64) -> Result<Self> {
        if t == C64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("EllipticParams::t"));
        }
        let pm = s.norm().powi(6);
        if pm > MAX_NOME_MODULUS || !pm.is_finite() {
            return Err(Error::NomeOutOfRange(pm));
        }
        Ok(Self { t, s })
    }

    /// Builds the primitives from `q` and `p` by taking principal roots once.
    ///
    /// Only for boundaries (CLI input, examples); everything downstream works
    /// from the primitives.
    pub fn with_principal_roots(q: C64, p: C64) -> Result<Self> {
        let t = if q == C64::new(0.0, 0.0) {
            q
        } else {
            q.powf(0.25)
        };
        let s = if p == C64::new(0.0, 0.0) {
            p
        } else {
            p.powf(1.0 / 6.0)
        };
        Self::new(t, s)
    }

    /// Same base, nome forced to zero (the basic-hypergeometric limit).
    pub fn basic(t: C64) -> Result<Self> {
        Self::new(t, C64::new(0.0, 0.0))
    }

    pub fn q(&self) -> C64 {
        ipow(self.t, 4)
    }
    pub fn q_half(&self) -> C64 {
        self.t * self.t
    }
    pub fn q_quarter(&self) -> C64 {
        self.t
    }
    pub fn p(&self) -> C64 {
        ipow(self.s, 6)
    }
    pub fn p_half(&self) -> C64 {
        ipow(self.s, 3)
    }
    pub fn p_third(&self) -> C64 {
        self.s * self.s
    }

    /// `q^{e/4}`.
    pub fn q_pow_quarter(&self, e: i64) -> C64 {
        ipow(self.t, e)
    }

    /// `q^{e/2}`.
    pub fn q_pow_half(&self, e: i64) -> C64 {
        ipow(self.t, 2 * e)
    }

    /// `q^e`.
    pub fn q_pow(&self, e: i64) -> C64 {
        ipow(self.t, 4 * e)
    }

    /// `p^{e/6}`.
    pub fn p_pow_sixth(&self, e: i64) -> C64 {
        ipow(self.s, e)
    }

    pub fn is_basic(&self) -> bool {
        self.s == C64::new(0.0, 0.0)
    }
}

/// Tail tolerance and hard cap for infinite products and lattice sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub tail_tol: f64,
    pub max_factors: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_tol: 1e-15,
            max_factors: 10_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_tol: f64, max_factors: usize) -> Result<Self> {
        if !(tail_tol > 0.0) || !tail_tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tail_tol must be positive, got {tail_tol}"
            )));
        }
        if max_factors == 0 {
            return Err(Error::InvalidParameter("max_factors must be >= 1".into()));
        }
        Ok(Self {
            tail_tol,
            max_factors,
        })
    }
}

/// Relative residual `|lhs - rhs| / max(|lhs|, |rhs|, 1e-300)`.
pub fn relative_residual(lhs: C64, rhs: C64) -> f64 {
    let scale = lhs.norm().max(rhs.norm()).max(1e-300);
    (lhs - rhs).norm() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractional_powers_come_from_primitives() {
        let pr = EllipticParams::new(c64(0.8, 0.3), c64(0.7, -0.2)).unwrap();
        assert_eq!(pr.q(), ipow(pr.t, 4));
        assert!((pr.q_half() * pr.q_half() - pr.q()).norm() < 1e-15);
        assert!((pr.p_third() * pr.p_third() * pr.p_third() - pr.p()).norm() < 1e-15);
        assert!((pr.p_half() * pr.p_half() - pr.p()).norm() < 1e-15);
        assert!((pr.q_pow_quarter(-6) * pr.q_pow_half(3) - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_primitives() {
        assert!(matches!(
            EllipticParams::new(c64(0.0, 0.0), c64(0.5, 0.0)),
            Err(Error::ZeroArgument(_))
        ));
        assert!(matches!(
            EllipticParams::new(c64(0.5, 0.0), c64(1.0, 0.0)),
            Err(Error::NomeOutOfRange(_))
        ));
        assert!(TruncationPolicy::new(0.0, 10).is_err());
        assert!(TruncationPolicy::new(1e-10, 0).is_err());
    }

    #[test]
    fn ipow_negative_and_zero() {
        let x = c64(0.3, 0.4);
        assert!((ipow(x, -3) * ipow(x, 3) - c64(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(ipow(c64(0.0, 0.0), 0), c64(1.0, 0.0));
    }
}
