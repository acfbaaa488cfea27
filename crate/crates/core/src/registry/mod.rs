//! Registry of verifiable identities and the randomized trial engine.
//!
//! Every entry pairs a constrained sampler with evaluators for both sides.
//! Trial `i` of identity `id` under seed `s` draws from a ChaCha stream keyed
//! by `(s, id, i)`, so reports do not depend on execution order or thread count.

mod entries;
mod sampler;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::DegenerationStudy;
use crate::error::{Error, Result};
use crate::params::{relative_residual, TruncationPolicy, C64};
use crate::sum::{condition_limit, track_condition};

pub use entries::registry;
pub use sampler::{ParamValue, Sampler, SamplingRanges};

/// Resampling budget per trial (poles, non-finite values, ill-conditioned points).
pub const MAX_RETRIES: usize = 100;

/// Evaluates both sides of one identity at a freshly sampled point.
pub type PairsFn = fn(&mut Sampler, &TruncationPolicy) -> Result<Vec<(C64, C64)>>;
/// Runs one `p → 0` convergence study at a sampled point.
pub type StudyFn = fn(&mut Sampler, &TruncationPolicy) -> Result<DegenerationStudy>;

/// What a trial checks.
#[derive(Clone, Copy)]
pub enum Check {
    /// Every `(lhs, rhs)` pair must agree to the tolerance.
    Equality(PairsFn),
    /// A convergence study; passes when residuals decrease strictly and, if
    /// given, every consecutive ratio lies in the band.
    Convergence { run: StudyFn, ratio_band: Option<(f64, f64)> },
}

/// One registered identity.
#[derive(Clone)]
pub struct Identity {
    pub id: &'static str,
    /// Descriptive name of the identity as it appears in the literature.
    pub anchor: &'static str,
    /// Sampled parameters and degree ranges.
    pub summary: &'static str,
    pub default_trials: usize,
    pub tolerance: f64,
    pub check: Check,
}

impl Identity {
    pub fn is_equality(&self) -> bool {
        matches!(self.check, Check::Equality(_))
    }
}

/// Listing row for `list`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityInfo {
    pub id: String,
    pub anchor: String,
    pub summary: String,
    pub default_trials: usize,
    pub tolerance: f64,
}

/// All identities, sorted by id.
pub fn list_identities() -> Vec<IdentityInfo> {
    let mut v: Vec<IdentityInfo> = registry()
        .iter()
        .map(|e| IdentityInfo {
            id: e.id.to_string(),
            anchor: e.anchor.to_string(),
            summary: e.summary.to_string(),
            default_trials: e.default_trials,
            tolerance: e.tolerance,
        })
        .collect();
    v.sort_by(|a, b| a.id.cmp(&b.id));
    v
}

pub fn find(id: &str) -> Result<Identity> {
    registry()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// A sampled point whose residual exceeded the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub params: BTreeMap<String, ParamValue>,
    pub residual: f64,
}

/// Outcome of running one identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub anchor: String,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub median_residual: f64,
    pub failures: Vec<FailureRecord>,
    pub passed: bool,
    /// Sampled points discarded for poles, non-finite values or a condition
    /// number beyond `tolerance · 1e14` (clamped to `[1e2, 1e6]`).
    pub resampled: usize,
    /// Median empirical convergence order (convergence studies only).
    pub empirical_order: Option<f64>,
    /// Seconds; excluded from determinism comparisons.
    pub wall_time: f64,
}

/// Knobs of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub trials: usize,
    pub seed: u64,
    /// Overrides the identity's declared tolerance.
    pub tolerance: Option<f64>,
    pub ranges: SamplingRanges,
    pub policy: TruncationPolicy,
    /// Multiplies every right-hand side; `1 + 1e-6` gives the negative control.
    pub rhs_scale: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            tolerance: None,
            ranges: SamplingRanges::default(),
            policy: TruncationPolicy::default(),
            rhs_scale: 1.0,
        }
    }
}

struct TrialResult {
    params: BTreeMap<String, ParamValue>,
    residual: f64,
    ok: bool,
    order: Option<f64>,
    resampled: usize,
}

fn run_trial(entry: &Identity, opts: &CheckOptions, tolerance: f64, index: u64) -> Result<TrialResult> {
    let mut sampler = Sampler::for_trial(opts.seed, entry.id, index, opts.ranges.clone());
    for attempt in 0..=MAX_RETRIES {
        sampler.clear_point();
        match entry.check {
            Check::Equality(f) => {
                let (pairs, kappa) = track_condition(|| f(&mut sampler, &opts.policy));
                let Ok(pairs) = pairs else { continue };
                let finite = pairs.iter().all(|(l, r)| l.is_finite() && r.is_finite());
                if !finite || !(kappa <= condition_limit(tolerance)) {
                    continue;
                }
                let residual = pairs
                    .iter()
                    .map(|&(l, r)| relative_residual(l, r * opts.rhs_scale))
                    .fold(0.0f64, f64::max);
                return Ok(TrialResult {
                    params: sampler.take_point(),
                    residual,
                    ok: residual <= tolerance,
                    order: None,
                    resampled: attempt,
                });
            }
            Check::Convergence { run, ratio_band } => {
                let Ok(study) = run(&mut sampler, &opts.policy) else { continue };
                if study.residuals.iter().any(|r| !r.is_finite()) {
                    continue;
                }
                let in_band = ratio_band
                    .map(|(lo, hi)| study.ratios.iter().all(|r| (lo..=hi).contains(r)))
                    .unwrap_or(true);
                return Ok(TrialResult {
                    params: sampler.take_point(),
                    residual: *study.residuals.last().unwrap_or(&0.0),
                    ok: study.monotone && in_band,
                    order: study.empirical_order.filter(|o| o.is_finite()),
                    resampled: attempt,
                });
            }
        }
    }
    Err(Error::SamplerExhausted {
        id: entry.id.to_string(),
        retries: MAX_RETRIES,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Runs `opts.trials` independent trials of `id` (in parallel on the current
/// rayon pool) and summarizes them.
pub fn check_identity(id: &str, opts: &CheckOptions) -> Result<VerificationReport> {
    let entry = find(id)?;
    run_identity(&entry, opts)
}

pub fn run_identity(entry: &Identity, opts: &CheckOptions) -> Result<VerificationReport> {
    if opts.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let tolerance = opts.tolerance.unwrap_or(entry.tolerance);
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    let start = Instant::now();
    let results: Vec<TrialResult> = (0..opts.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(entry, opts, tolerance, i))
        .collect::<Result<_>>()?;

    let mut residuals: Vec<f64> = results.iter().map(|r| r.residual).collect();
    let max_residual = residuals.iter().copied().fold(0.0f64, f64::max);
    let median_residual = median(&mut residuals);
    let mut orders: Vec<f64> = results.iter().filter_map(|r| r.order).collect();
    let empirical_order = (!orders.is_empty()).then(|| median(&mut orders));
    let resampled = results.iter().map(|r| r.resampled).sum();
    let failures: Vec<FailureRecord> = results
        .into_iter()
        .filter(|r| !r.ok)
        .map(|r| FailureRecord {
            params: r.params,
            residual: r.residual,
        })
        .collect();
    Ok(VerificationReport {
        id: entry.id.to_string(),
        anchor: entry.anchor.to_string(),
        trials: opts.trials,
        seed: opts.seed,
        tolerance,
        max_residual,
        median_residual,
        passed: failures.is_empty(),
        failures,
        resampled,
        empirical_order,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
