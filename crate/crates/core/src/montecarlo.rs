//! Monte Carlo estimation of the connection probability.
//!
//! Trial `i` of a run seeded with `seed` samples its field from the derived
//! seed `rng::mix(seed, i)`. Results are reduced as integer counts, so they do
//! not depend on how trials are spread over worker threads.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{free_space_connected, horizontal_segment_intersects_rect, AxisRect, ConnectivityOutcome};
use crate::model::{
    sample_field, sample_field_in, sampling_window, BlockageModelParams, Condition, LinkGeometry, ModelError,
};
use crate::rng;
use crate::stats::{binomial_std_err, wilson_interval, Z_95};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("number of trials must be at least 1")]
    NoTrials,
    #[error("no trial met the {condition} condition in {n_total} attempts; increase n")]
    NoAcceptedTrials { condition: &'static str, n_total: u64 },
    #[error("kappa list must be non-empty")]
    EmptyKappaList,
    #[error("kappa list must be ascending")]
    UnsortedKappaList,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A binomial probability estimate with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_effective: u64,
    pub n_total: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn from_counts(successes: u64, n_effective: u64, n_total: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, n_effective, Z_95);
        Self {
            mean: successes as f64 / n_effective as f64,
            std_err: binomial_std_err(successes, n_effective),
            n_effective,
            n_total,
            ci_low,
            ci_high,
            seed,
        }
    }

    pub fn successes(&self) -> u64 {
        (self.mean * self.n_effective as f64).round() as u64
    }

    /// Fraction of generated trials that met the conditioning event.
    pub fn acceptance_rate(&self) -> f64 {
        self.n_effective as f64 / self.n_total as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Rejected,
    Connected,
    Blocked,
}

fn connected(link: &LinkGeometry, obstacles: &[AxisRect]) -> bool {
    let strip = link.strip();
    free_space_connected(&strip, obstacles, link.source(), link.destination())
        .map(|ConnectivityOutcome { connected, .. }| connected)
        .expect("link endpoints lie on the strip")
}

/// Runs trial `index` of a run seeded with `seed`.
pub fn trial_outcome(
    params: &BlockageModelParams,
    link: &LinkGeometry,
    condition: Condition,
    seed: u64,
    index: u64,
) -> TrialOutcome {
    let field = sample_field(params, link, rng::mix(seed, index));
    if !condition.holds(link, &field) {
        TrialOutcome::Rejected
    } else if connected(link, &field.obstacles) {
        TrialOutcome::Connected
    } else {
        TrialOutcome::Blocked
    }
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    Ok(pool.install(f))
}

/// Estimates the (conditional) probability that the link is connected.
///
/// Trials whose field violates `condition` are rejected: they count toward
/// `n_total` but not toward `n_effective`.
pub fn estimate_connectivity(
    params: &BlockageModelParams,
    link: &LinkGeometry,
    condition: Condition,
    n: u64,
    seed: u64,
) -> Result<MCEstimate, EstimateError> {
    if n == 0 {
        return Err(EstimateError::NoTrials);
    }
    let (accepted, successes) = (0..n)
        .into_par_iter()
        .map(|i| match trial_outcome(params, link, condition, seed, i) {
            TrialOutcome::Rejected => (0u64, 0u64),
            TrialOutcome::Connected => (1, 1),
            TrialOutcome::Blocked => (1, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if accepted == 0 {
        return Err(EstimateError::NoAcceptedTrials { condition: condition.as_str(), n_total: n });
    }
    Ok(MCEstimate::from_counts(successes, accepted, n, seed))
}

/// Line-of-sight indicator of trial `index`; the same field as the
/// zero-width-window trial with that seed.
pub fn los_trial(params: &BlockageModelParams, d: f64, seed: u64, index: u64) -> Result<bool, EstimateError> {
    let link = LinkGeometry::new(d, 0.0)?;
    let field = sample_field(params, &link, rng::mix(seed, index));
    Ok(!field.obstacles.iter().any(|r| horizontal_segment_intersects_rect(0.0, d, r)))
}

/// Estimates the probability that the direct segment of length `d` is clear.
pub fn estimate_p_los(params: &BlockageModelParams, d: f64, n: u64, seed: u64) -> Result<MCEstimate, EstimateError> {
    if n == 0 {
        return Err(EstimateError::NoTrials);
    }
    LinkGeometry::new(d, 0.0)?;
    let successes: u64 =
        (0..n).into_par_iter().map(|i| u64::from(los_trial(params, d, seed, i).unwrap_or(false))).sum();
    Ok(MCEstimate::from_counts(successes, n, n, seed))
}

/// Estimates for several windows evaluated on shared obstacle fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedKappaResult {
    pub kappas: Vec<f64>,
    pub estimates: Vec<MCEstimate>,
    /// `discordant[a * k + b]`: accepted trials connected at `kappas[a]` but not at `kappas[b]`.
    discordant: Vec<u64>,
}

/// Mean and standard error of a per-trial difference of indicators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceEstimate {
    pub mean: f64,
    pub std_err: f64,
}

impl DifferenceEstimate {
    /// One-sided test that the true difference is positive at normal quantile `z`.
    pub fn is_positive_at(&self, z: f64) -> bool {
        self.mean - z * self.std_err > 0.0
    }
}

impl PairedKappaResult {
    pub fn discordant(&self, a: usize, b: usize) -> u64 {
        self.discordant[a * self.kappas.len() + b]
    }

    /// `mean(kappas[b]) - mean(kappas[a])` from the paired per-trial differences.
    pub fn difference(&self, a: usize, b: usize) -> DifferenceEstimate {
        let n = self.estimates[a].n_effective as f64;
        let gain = self.discordant(b, a) as f64;
        let loss = self.discordant(a, b) as f64;
        let mean = (gain - loss) / n;
        let second_moment = (gain + loss) / n;
        DifferenceEstimate { mean, std_err: ((second_moment - mean * mean).max(0.0) / n).sqrt() }
    }
}

/// Connection indicators of trial `index` for every window, on one field
/// sampled in the window of the widest strip. `None` if the trial is rejected.
pub fn paired_trial(
    params: &BlockageModelParams,
    d: f64,
    kappas: &[f64],
    condition: Condition,
    seed: u64,
    index: u64,
) -> Result<Option<Vec<bool>>, EstimateError> {
    let widest = LinkGeometry::new(d, kappas.iter().copied().fold(0.0, f64::max))?;
    let field = sample_field_in(params, sampling_window(&widest, params), rng::mix(seed, index));
    if !condition.holds(&widest, &field) {
        return Ok(None);
    }
    kappas
        .iter()
        .map(|&k| Ok(connected(&LinkGeometry::new(d, k)?, &field.obstacles)))
        .collect::<Result<Vec<_>, EstimateError>>()
        .map(Some)
}

/// Unconditional window comparison with common random numbers.
pub fn paired_kappa_comparison(
    params: &BlockageModelParams,
    d: f64,
    kappas: &[f64],
    n: u64,
    seed: u64,
) -> Result<PairedKappaResult, EstimateError> {
    paired_kappa_comparison_with(params, d, kappas, Condition::Unconditional, n, seed)
}

pub fn paired_kappa_comparison_with(
    params: &BlockageModelParams,
    d: f64,
    kappas: &[f64],
    condition: Condition,
    n: u64,
    seed: u64,
) -> Result<PairedKappaResult, EstimateError> {
    if n == 0 {
        return Err(EstimateError::NoTrials);
    }
    if kappas.is_empty() {
        return Err(EstimateError::EmptyKappaList);
    }
    if kappas.windows(2).any(|w| !matches!(w[0].partial_cmp(&w[1]), Some(Ordering::Less | Ordering::Equal))) {
        return Err(EstimateError::UnsortedKappaList);
    }
    for &k in kappas {
        LinkGeometry::new(d, k)?;
    }

    let k = kappas.len();
    // layout: [accepted, successes per kappa (k), discordant matrix (k * k)]
    let width = 1 + k + k * k;
    let counts = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, i| {
                if let Ok(Some(hits)) = paired_trial(params, d, kappas, condition, seed, i) {
                    acc[0] += 1;
                    for a in 0..k {
                        acc[1 + a] += u64::from(hits[a]);
                        for b in 0..k {
                            acc[1 + k + a * k + b] += u64::from(hits[a] && !hits[b]);
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let accepted = counts[0];
    if accepted == 0 {
        return Err(EstimateError::NoAcceptedTrials { condition: condition.as_str(), n_total: n });
    }
    Ok(PairedKappaResult {
        kappas: kappas.to_vec(),
        estimates: (0..k).map(|a| MCEstimate::from_counts(counts[1 + a], accepted, n, seed)).collect(),
        discordant: counts[1 + k..].to_vec(),
    })
}
