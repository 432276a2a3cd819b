//! Single-obstacle upper bounds on the connection probability.
//!
//! Every bound has the form `exp(-lambda_o * E[kernel(W, L)])` for some
//! piecewise-bilinear blocked-centroid area. Atomic grain laws are summed
//! exactly; laws with a density go through a product trapezoid rule whose
//! panels are split at the kernel seams `w = d` and `l = kappa`, refined by
//! halving until successive iterates agree.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BlockageModelParams, Condition, GrainDistribution, LinkGeometry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("{name} must be finite and positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite and non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("invalid quadrature settings: {0}")]
    BadQuadrature(&'static str),
    #[error("quadrature did not converge after {refinements} refinements (last iterates {previous} and {last})")]
    NoConvergence { refinements: u32, previous: f64, last: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, AnalyticsError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(AnalyticsError::NonPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, AnalyticsError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(AnalyticsError::Negative { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_refinements: 30 }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<(), AnalyticsError> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(AnalyticsError::BadQuadrature("abs_tol must be finite and positive"));
        }
        if self.max_refinements == 0 {
            return Err(AnalyticsError::BadQuadrature("max_refinements must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Unconditional,
    SrcOutdoor,
    BothOutdoor,
    PLos,
    OptimalWindow,
}

impl From<Condition> for BoundKind {
    fn from(c: Condition) -> Self {
        match c {
            Condition::Unconditional => BoundKind::Unconditional,
            Condition::SrcOutdoor => BoundKind::SrcOutdoor,
            Condition::BothOutdoor => BoundKind::BothOutdoor,
        }
    }
}

/// A probability bound. `clamped` is set when the raw expression exceeded 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub kind: BoundKind,
    pub clamped: bool,
}

impl BoundResult {
    /// `exp(exponent)` clamped to `[0, 1]`.
    fn from_exponent(exponent: f64, kind: BoundKind) -> Self {
        let raw = exponent.exp();
        if raw > 1.0 {
            Self { value: 1.0, kind, clamped: true }
        } else {
            Self { value: raw.max(0.0), kind, clamped: false }
        }
    }
}

/// Area of the centroid region in which one `w x l` grain blocks the link.
#[inline]
fn kernel(w: f64, l: f64, d: f64, kappa: f64) -> f64 {
    if w >= d {
        (w + d) * l
    } else if l < kappa {
        2.0 * w * l
    } else {
        (l - kappa) * (d - w) + 2.0 * w * l
    }
}

/// Blocked-centroid area for a grain of width `w` (along the link) and
/// length `l` (across it).
pub fn area_kernel(w: f64, l: f64, d: f64, kappa: f64) -> Result<f64, AnalyticsError> {
    positive("w", w)?;
    positive("l", l)?;
    positive("d", d)?;
    non_negative("kappa", kappa)?;
    Ok(kernel(w, l, d, kappa))
}

/// Nodes and weights of one axis at a given refinement level.
fn axis_rule(law: &GrainDistribution, seams: &[f64], level: u32) -> Vec<(f64, f64)> {
    if let Some(atoms) = law.atoms() {
        return atoms;
    }
    let (lo, hi) = (law.support_min(), law.support_max());
    let mut breaks = vec![lo];
    breaks.extend(seams.iter().copied().filter(|s| *s > lo && *s < hi));
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);

    let density = 1.0 / (hi - lo);
    let parts = 1usize << level;
    let mut rule = Vec::with_capacity((breaks.len() - 1) * (parts + 1));
    for panel in breaks.windows(2) {
        let h = (panel[1] - panel[0]) / parts as f64;
        for k in 0..=parts {
            let x = if k == parts { panel[1] } else { panel[0] + k as f64 * h };
            let end = k == 0 || k == parts;
            rule.push((x, if end { 0.5 * h * density } else { h * density }));
        }
    }
    rule
}

fn converged(previous: f64, last: f64, abs_tol: f64) -> bool {
    // a few ulps of slack for values far above abs_tol
    (last - previous).abs() <= abs_tol.max(16.0 * f64::EPSILON * last.abs())
}

/// `E[f(W, L)]` for independent `W` and `L`.
pub(crate) fn product_expectation<F>(
    width: &GrainDistribution,
    length: &GrainDistribution,
    width_seams: &[f64],
    length_seams: &[f64],
    quad: &QuadratureSpec,
    f: F,
) -> Result<f64, AnalyticsError>
where
    F: Fn(f64, f64) -> f64,
{
    quad.validate()?;
    let evaluate = |level: u32| {
        let ws = axis_rule(width, width_seams, level);
        let ls = axis_rule(length, length_seams, level);
        ls.iter().map(|&(l, ql)| ql * ws.iter().map(|&(w, qw)| qw * f(w, l)).sum::<f64>()).sum::<f64>()
    };
    let mut previous = evaluate(0);
    if width.atoms().is_some() && length.atoms().is_some() {
        return Ok(previous);
    }
    for level in 1..=quad.max_refinements {
        let last = evaluate(level);
        if converged(previous, last, quad.abs_tol) {
            return Ok(last);
        }
        if level == quad.max_refinements {
            return Err(AnalyticsError::NoConvergence { refinements: level, previous, last });
        }
        previous = last;
    }
    unreachable!("max_refinements >= 1")
}

/// `E[f(X)]` for a single grain dimension.
pub(crate) fn expectation<F>(
    law: &GrainDistribution,
    seams: &[f64],
    quad: &QuadratureSpec,
    f: F,
) -> Result<f64, AnalyticsError>
where
    F: Fn(f64) -> f64,
{
    let unit = GrainDistribution::Deterministic { value: 1.0 };
    product_expectation(law, &unit, seams, &[], quad, |x, _| f(x))
}

/// `E[A(W, L)]` for the link.
pub fn mean_blocked_area(
    params: &BlockageModelParams,
    link: &LinkGeometry,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticsError> {
    let (d, kappa) = (link.d, link.kappa);
    product_expectation(&params.width_dist, &params.length_dist, &[d], &[kappa], quad, |w, l| kernel(w, l, d, kappa))
}

/// Upper bound on the probability that source and destination are connected.
pub fn connectivity_upper_bound(
    params: &BlockageModelParams,
    link: &LinkGeometry,
    quad: &QuadratureSpec,
) -> Result<BoundResult, AnalyticsError> {
    let area = mean_blocked_area(params, link, quad)?;
    Ok(BoundResult::from_exponent(-params.lambda_o * area, BoundKind::Unconditional))
}

/// Line-of-sight probability of a link of length `d`. Exact, from grain means only.
pub fn p_los(params: &BlockageModelParams, d: f64) -> Result<BoundResult, AnalyticsError> {
    positive("d", d)?;
    let exponent = -params.lambda_o * params.mean_length() * (d + params.mean_width());
    Ok(BoundResult::from_exponent(exponent, BoundKind::PLos))
}

/// Closed-form bound for grains of fixed size `w x l`.
pub fn fixed_size_upper_bound(
    lambda_o: f64,
    w: f64,
    l: f64,
    d: f64,
    kappa: f64,
) -> Result<BoundResult, AnalyticsError> {
    non_negative("lambda_o", lambda_o)?;
    positive("w", w)?;
    positive("l", l)?;
    positive("d", d)?;
    non_negative("kappa", kappa)?;
    let exponent = if w >= d {
        -lambda_o * (w + d) * l
    } else if l < kappa {
        -lambda_o * 2.0 * w * l
    } else {
        -lambda_o * ((l - kappa) * (d - w) + 2.0 * w * l)
    };
    Ok(BoundResult::from_exponent(exponent, BoundKind::Unconditional))
}

/// The window `kappa* = l_max` that maximizes the bound, and the bound there.
///
/// Evaluated through its own factorized form, `E[L] * E[g(W)]` with
/// `g(w) = w + d` for `w >= d` and `2w` otherwise, rather than through the
/// two-dimensional kernel.
pub fn optimal_window_bound(
    params: &BlockageModelParams,
    d: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, BoundResult), AnalyticsError> {
    positive("d", d)?;
    let kappa_star = params.length_dist.support_max();
    let per_length = expectation(&params.width_dist, &[d], quad, |w| if w >= d { w + d } else { 2.0 * w })?;
    let exponent = -params.lambda_o * params.mean_length() * per_length;
    Ok((kappa_star, BoundResult::from_exponent(exponent, BoundKind::OptimalWindow)))
}

/// Bound conditioned on the source, or both endpoints, being outdoors.
pub fn conditional_upper_bound(
    params: &BlockageModelParams,
    link: &LinkGeometry,
    condition: Condition,
    quad: &QuadratureSpec,
) -> Result<BoundResult, AnalyticsError> {
    let lambda = params.lambda_o;
    let mean_cover = params.mean_width() * params.mean_length();
    let area = mean_blocked_area(params, link, quad)?;
    let exponent = match condition {
        Condition::Unconditional => -lambda * area,
        Condition::SrcOutdoor => lambda * mean_cover - lambda * area,
        Condition::BothOutdoor => {
            let d = link.d;
            // both endpoints inside one wide grain is no longer possible
            let overlap = product_expectation(&params.width_dist, &params.length_dist, &[d], &[], quad, |w, l| {
                if w >= d {
                    (w - d) * l
                } else {
                    0.0
                }
            })?;
            2.0 * lambda * mean_cover - lambda * (area + overlap)
        }
    };
    Ok(BoundResult::from_exponent(exponent, condition.into()))
}

/// All bounds reported for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub unconditional: BoundResult,
    pub p_los: BoundResult,
    pub src_outdoor: BoundResult,
    pub both_outdoor: BoundResult,
    pub kappa_star: f64,
    pub optimal_window: BoundResult,
}

pub fn all_bounds(
    params: &BlockageModelParams,
    link: &LinkGeometry,
    quad: &QuadratureSpec,
) -> Result<BoundSet, AnalyticsError> {
    let (kappa_star, optimal_window) = optimal_window_bound(params, link.d, quad)?;
    Ok(BoundSet {
        unconditional: connectivity_upper_bound(params, link, quad)?,
        p_los: p_los(params, link.d)?,
        src_outdoor: conditional_upper_bound(params, link, Condition::SrcOutdoor, quad)?,
        both_outdoor: conditional_upper_bound(params, link, Condition::BothOutdoor, quad)?,
        kappa_star,
        optimal_window,
    })
}
