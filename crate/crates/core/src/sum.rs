//! Compensated (Neumaier) accumulation for complex terms, with an optional
//! record of how much cancellation the finished sums went through.

use std::cell::Cell;

use crate::params::C64;

/// Condition number above which a double-precision sum can no longer be
/// trusted to the `1e-9` level; points beyond it are resampled by the
/// verification harness. Terms built from dozens of theta factors carry
/// relative errors near `1e-14`, so `κ = 1e5` already spends the budget.
pub const CONDITION_LIMIT: f64 = 1e5;

/// Condition limit matched to a residual tolerance: `tol · 1e14`, clamped to
/// `[1e2, 1e6]`. Equals [`CONDITION_LIMIT`] at `tol = 1e-9`.
pub fn condition_limit(tolerance: f64) -> f64 {
    (tolerance * 1e14).clamp(1e2, 1e6)
}

thread_local! {
    static WORST_CONDITION: Cell<Option<f64>> = const { Cell::new(None) };
}

/// Runs `f` and returns the largest condition number `Σ|t_k| / |Σ t_k|` of
/// every sum finished with [`CompensatedSum::finish`] on this thread meanwhile.
///
/// A sum of terms each carrying relative error `ε` is only known to about
/// `κ·ε`, so this bounds the residual a double-precision check can reach.
pub fn track_condition<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let outer = WORST_CONDITION.with(|c| c.replace(Some(1.0)));
    let out = f();
    let inner = WORST_CONDITION.with(|c| c.replace(outer)).unwrap_or(1.0);
    if let Some(o) = outer {
        WORST_CONDITION.with(|c| c.set(Some(o.max(inner))));
    }
    (out, inner)
}

/// Raises the condition number seen by the enclosing [`track_condition`], if
/// any. Used where stages compound: a sum of inputs that were themselves
/// amplified by `κ₁` and that cancels by `κ₂` is good to about `κ₁κ₂·ε`.
pub fn note_condition(kappa: f64) {
    WORST_CONDITION.with(|c| {
        if let Some(o) = c.get() {
            c.set(Some(o.max(kappa)));
        }
    });
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Running complex sum with error-free-transformation compensation on each component.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: Neumaier,
    im: Neumaier,
    magnitude: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
        self.magnitude += z.norm();
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }

    /// `Σ|t_k| / |Σ t_k|`; 1 for an empty sum.
    pub fn condition(&self) -> f64 {
        if self.magnitude == 0.0 {
            return 1.0;
        }
        self.magnitude / self.value().norm()
    }

    /// The final value; also reports the condition number to [`track_condition`].
    pub fn finish(self) -> C64 {
        WORST_CONDITION.with(|c| {
            if let Some(w) = c.get() {
                c.set(Some(w.max(self.condition())));
            }
        });
        self.value()
    }
}

impl FromIterator<C64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of an iterator of complex values.
pub fn csum<I: IntoIterator<Item = C64>>(iter: I) -> C64 {
    iter.into_iter().collect::<CompensatedSum>().finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_summation() {
        let terms = [
            C64::new(1e16, -1e16),
            C64::new(1.0, 1.0),
            C64::new(-1e16, 1e16),
        ];
        assert_eq!(csum(terms), C64::new(1.0, 1.0));
        let naive: C64 = terms.iter().sum();
        assert_ne!(naive, C64::new(1.0, 1.0));
    }

    #[test]
    fn condition_is_tracked() {
        let ((), k) = track_condition(|| {
            csum([C64::new(1.0, 0.0), C64::new(-1.0 + 1e-6, 0.0)]);
            csum([C64::new(1.0, 0.0)]);
        });
        assert!((k / 2e6 - 1.0).abs() < 1e-6);
        let (_, untracked) = track_condition(|| ());
        assert_eq!(untracked, 1.0);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(csum(std::iter::empty()), C64::new(0.0, 0.0));
    }
}
