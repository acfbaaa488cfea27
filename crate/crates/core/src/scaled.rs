//! Complex numbers with a separate binary exponent.
//!
//! Terms of terminating sums are often products of factors near `1e-300` and
//! `1e+300` whose product is of ordinary size. Carrying the exponent apart
//! keeps such products exact to rounding instead of flushing to 0 or inf.

use std::ops::{Div, Mul};

use crate::params::C64;

/// `m · 2^e` with `max(|re m|, |im m|)` kept near 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    m: C64,
    e: i64,
}

fn pow2(k: i64) -> f64 {
    // exact for the exponents normalisation produces
    f64::powi(2.0, k.clamp(-1074, 1023) as i32)
}

impl Scaled {
    pub fn one() -> Self {
        Self { m: C64::new(1.0, 0.0), e: 0 }
    }

    pub fn new(z: C64) -> Self {
        Self { m: z, e: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let mag = self.m.re.abs().max(self.m.im.abs());
        if mag == 0.0 || !mag.is_finite() {
            return self;
        }
        let k = mag.log2().floor() as i64;
        if k == 0 {
            return self;
        }
        Self {
            m: self.m * pow2(-k),
            e: self.e + k,
        }
    }

    /// The plain value; underflows to 0 or overflows to inf only if the value itself does.
    pub fn value(self) -> C64 {
        let half = self.e / 2;
        self.m * pow2(half) * pow2(self.e - half)
    }

    /// `log2 |value|`, finite for nonzero finite values.
    pub fn log2_abs(self) -> f64 {
        self.m.norm().log2() + self.e as f64
    }

    pub fn is_zero(self) -> bool {
        self.m == C64::new(0.0, 0.0)
    }
}

impl From<C64> for Scaled {
    fn from(z: C64) -> Self {
        Self::new(z)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, o: Scaled) -> Scaled {
        Scaled { m: self.m * o.m, e: self.e + o.e }.normalized()
    }
}

impl Mul<C64> for Scaled {
    type Output = Scaled;
    fn mul(self, o: C64) -> Scaled {
        self * Scaled::new(o)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, o: Scaled) -> Scaled {
        Scaled { m: self.m / o.m, e: self.e - o.e }.normalized()
    }
}

impl Div<C64> for Scaled {
    type Output = Scaled;
    fn div(self, o: C64) -> Scaled {
        self / Scaled::new(o)
    }
}
