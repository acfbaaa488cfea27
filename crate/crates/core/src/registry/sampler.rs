//! Per-trial random parameter draws.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::{EllipticParams, C64};

/// Ranges the sampler draws from. Moduli are log-uniform, phases uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingRanges {
    /// Modulus range of free complex parameters.
    pub param_modulus: (f64, f64),
    pub q_modulus: (f64, f64),
    pub p_modulus: (f64, f64),
    /// Largest single-variable degree.
    pub max_n: usize,
    /// Largest per-variable degree in the multivariate identities.
    pub max_n_multi: usize,
    /// Largest number of variables.
    pub max_m: usize,
}

impl Default for SamplingRanges {
    fn default() -> Self {
        Self {
            param_modulus: (0.3, 1.5),
            q_modulus: (0.2, 0.8),
            p_modulus: (0.05, 0.5),
            max_n: 6,
            max_n_multi: 3,
            max_m: 3,
        }
    }
}

/// A recorded parameter value, for failure reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Complex(C64),
    List(Vec<C64>),
    Text(String),
}

/// 64-bit FNV-1a, used to fold the identity id into the stream key.
fn fnv1a64(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Random source for one trial, recording every named draw.
pub struct Sampler {
    rng: ChaCha8Rng,
    pub ranges: SamplingRanges,
    point: BTreeMap<String, ParamValue>,
}

impl Sampler {
    /// Stream keyed by `(seed, id, index)`.
    pub fn for_trial(seed: u64, id: &str, index: u64, ranges: SamplingRanges) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&fnv1a64(id).to_le_bytes());
        key[16..24].copy_from_slice(&index.to_le_bytes());
        Self {
            rng: ChaCha8Rng::from_seed(key),
            ranges,
            point: BTreeMap::new(),
        }
    }

    pub fn clear_point(&mut self) {
        self.point.clear();
    }

    pub fn take_point(&mut self) -> BTreeMap<String, ParamValue> {
        std::mem::take(&mut self.point)
    }

    pub fn record(&mut self, name: &str, v: ParamValue) {
        self.point.insert(name.to_string(), v);
    }

    fn log_uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        if lo == hi {
            return lo;
        }
        self.rng.gen_range(lo.ln()..hi.ln()).exp()
    }

    fn phase(&mut self) -> f64 {
        self.rng.gen_range(0.0..TAU)
    }

    /// Uniform real in `[lo, hi)`, unrecorded.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Unrecorded integer uniform in `lo..=hi`.
    pub fn rng_degree(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    /// Unrecorded free complex parameter.
    pub fn draw_complex(&mut self) -> C64 {
        let r = self.log_uniform(self.ranges.param_modulus);
        C64::from_polar(r, self.phase())
    }

    /// Complex number with modulus log-uniform in `range`.
    pub fn complex_in(&mut self, name: &str, range: (f64, f64)) -> C64 {
        let r = self.log_uniform(range);
        let z = C64::from_polar(r, self.phase());
        self.record(name, ParamValue::Complex(z));
        z
    }

    /// Free complex parameter.
    pub fn complex(&mut self, name: &str) -> C64 {
        let range = self.ranges.param_modulus;
        self.complex_in(name, range)
    }

    pub fn complexes(&mut self, name: &str, len: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..len).map(|_| self.draw_complex()).collect();
        self.record(name, ParamValue::List(v.clone()));
        v
    }

    /// Integer uniform in `lo..=hi`.
    pub fn int(&mut self, name: &str, lo: i64, hi: i64) -> i64 {
        let k = self.rng.gen_range(lo..=hi);
        self.record(name, ParamValue::Int(k));
        k
    }

    pub fn degree(&mut self, name: &str, lo: usize, hi: usize) -> usize {
        self.int(name, lo as i64, hi as i64) as usize
    }

    /// Base `t` (`q = t^4`) from the `q` range, unrecorded.
    fn base_root(&mut self) -> C64 {
        let q = self.log_uniform(self.ranges.q_modulus);
        C64::from_polar(q.powf(0.25), self.phase())
    }

    /// Nome root `s` (`p = s^6`) with `|p|` log-uniform in `range`.
    pub fn nome_root_in(&mut self, name: &str, range: (f64, f64)) -> C64 {
        let p = self.log_uniform(range);
        let s = C64::from_polar(p.powf(1.0 / 6.0), self.phase());
        self.record(name, ParamValue::Complex(s));
        s
    }

    /// Elliptic base and nome.
    pub fn params(&mut self) -> Result<EllipticParams> {
        let t = self.base_root();
        self.record("t", ParamValue::Complex(t));
        let range = self.ranges.p_modulus;
        let s = self.nome_root_in("s", range);
        EllipticParams::new(t, s)
    }

    /// Base only, `p = 0`.
    pub fn basic_params(&mut self) -> Result<EllipticParams> {
        let t = self.base_root();
        self.record("t", ParamValue::Complex(t));
        EllipticParams::basic(t)
    }
}
