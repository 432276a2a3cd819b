//! Grain laws and realizations of the Boolean obstacle field.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{point_in_rect, AxisRect, Point, Strip};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{0} must be finite and positive")]
    NonPositive(&'static str),
    #[error("{0} must be finite and non-negative")]
    Negative(&'static str),
    #[error("uniform law needs lo <= hi, got lo={lo} hi={hi}")]
    InvertedInterval { lo: f64, hi: f64 },
    #[error("pmf needs matching non-empty value and probability lists ({values} values, {probs} probabilities)")]
    PmfShape { values: usize, probs: usize },
    #[error("pmf probabilities must be non-negative and sum to 1 (sum = {sum})")]
    PmfMass { sum: f64 },
}

/// Law of one grain dimension, in meters. Supports are finite and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawGrain")]
pub enum GrainDistribution {
    Deterministic { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Pmf { values: Vec<f64>, probs: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawGrain {
    Deterministic { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Pmf { values: Vec<f64>, probs: Vec<f64> },
}

impl TryFrom<RawGrain> for GrainDistribution {
    type Error = ModelError;

    fn try_from(raw: RawGrain) -> Result<Self, Self::Error> {
        match raw {
            RawGrain::Deterministic { value } => Self::deterministic(value),
            RawGrain::Uniform { lo, hi } => Self::uniform(lo, hi),
            RawGrain::Pmf { values, probs } => Self::pmf(values, probs),
        }
    }
}

const PMF_MASS_TOL: f64 = 1e-12;

fn positive(name: &'static str, v: f64) -> Result<f64, ModelError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ModelError::NonPositive(name))
    }
}

impl GrainDistribution {
    pub fn deterministic(value: f64) -> Result<Self, ModelError> {
        Ok(Self::Deterministic { value: positive("grain value", value)? })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, ModelError> {
        positive("uniform lo", lo)?;
        positive("uniform hi", hi)?;
        if lo > hi {
            return Err(ModelError::InvertedInterval { lo, hi });
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn pmf(values: Vec<f64>, probs: Vec<f64>) -> Result<Self, ModelError> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(ModelError::PmfShape { values: values.len(), probs: probs.len() });
        }
        for &v in &values {
            positive("pmf value", v)?;
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > PMF_MASS_TOL {
            return Err(ModelError::PmfMass { sum });
        }
        Ok(Self::Pmf { values, probs })
    }

    pub fn support_min(&self) -> f64 {
        match self {
            Self::Deterministic { value } => *value,
            Self::Uniform { lo, .. } => *lo,
            Self::Pmf { values, probs } => {
                values.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(v, _)| *v).fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn support_max(&self) -> f64 {
        match self {
            Self::Deterministic { value } => *value,
            Self::Uniform { hi, .. } => *hi,
            Self::Pmf { values, probs } => {
                values.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Deterministic { value } => *value,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Pmf { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Deterministic { value } => f64::from(u8::from(x >= *value)),
            Self::Uniform { lo, hi } => {
                if x >= *hi {
                    1.0
                } else if x < *lo {
                    0.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            Self::Pmf { values, probs } => values.iter().zip(probs).filter(|(v, _)| **v <= x).map(|(_, p)| p).sum(),
        }
    }

    /// Point masses, or `None` for a law with a density.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::Deterministic { value } => Some(vec![(*value, 1.0)]),
            Self::Uniform { lo, hi } if lo == hi => Some(vec![(*lo, 1.0)]),
            Self::Uniform { .. } => None,
            Self::Pmf { values, probs } => Some(values.iter().copied().zip(probs.iter().copied()).collect()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Deterministic { value } => *value,
            Self::Uniform { lo, hi } => {
                if lo == hi {
                    *lo
                } else {
                    rng.random_range(*lo..*hi)
                }
            }
            Self::Pmf { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                // rounding left u above the accumulated mass
                values[probs.iter().rposition(|p| *p > 0.0).unwrap_or(values.len() - 1)]
            }
        }
    }
}

/// Obstacle intensity together with the independent width and length laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockageModelParams {
    pub lambda_o: f64,
    pub width_dist: GrainDistribution,
    pub length_dist: GrainDistribution,
}

impl BlockageModelParams {
    pub fn new(
        lambda_o: f64,
        width_dist: GrainDistribution,
        length_dist: GrainDistribution,
    ) -> Result<Self, ModelError> {
        if !(lambda_o.is_finite() && lambda_o >= 0.0) {
            return Err(ModelError::Negative("lambda_o"));
        }
        Ok(Self { lambda_o, width_dist, length_dist })
    }

    /// Fixed-size grains `w x l`.
    pub fn fixed(lambda_o: f64, w: f64, l: f64) -> Result<Self, ModelError> {
        Self::new(lambda_o, GrainDistribution::deterministic(w)?, GrainDistribution::deterministic(l)?)
    }

    pub fn with_lambda(&self, lambda_o: f64) -> Result<Self, ModelError> {
        Self::new(lambda_o, self.width_dist.clone(), self.length_dist.clone())
    }

    pub fn mean_width(&self) -> f64 {
        self.width_dist.mean()
    }

    pub fn mean_length(&self) -> f64 {
        self.length_dist.mean()
    }
}

/// Source at the origin, destination at `(d, 0)`, relay window `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub d: f64,
    pub kappa: f64,
}

impl LinkGeometry {
    pub fn new(d: f64, kappa: f64) -> Result<Self, ModelError> {
        positive("d", d)?;
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(ModelError::Negative("kappa"));
        }
        Ok(Self { d, kappa })
    }

    pub fn strip(&self) -> Strip {
        Strip { d: self.d, kappa: self.kappa }
    }

    pub fn source(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    pub fn destination(&self) -> Point {
        Point::new(self.d, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Window {
    pub fn area(&self) -> f64 {
        (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x_lo..=self.x_hi).contains(&p.x) && (self.y_lo..=self.y_hi).contains(&p.y)
    }
}

/// Region holding every centroid whose grain can touch the closed strip:
/// the strip dilated by half the largest possible grain in each axis.
pub fn sampling_window(link: &LinkGeometry, params: &BlockageModelParams) -> Window {
    let half_w = params.width_dist.support_max() / 2.0;
    let half_y = (link.kappa + params.length_dist.support_max()) / 2.0;
    Window { x_lo: -half_w, x_hi: link.d + half_w, y_lo: -half_y, y_hi: half_y }
}

/// One realization of the obstacle union restricted to a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleField {
    pub obstacles: Vec<AxisRect>,
    pub window: Window,
    pub seed: u64,
}

impl ObstacleField {
    pub fn len(&self) -> usize {
        self.obstacles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obstacles.is_empty()
    }

    /// Superposition of two independent fields over the same window.
    pub fn union(&self, other: &ObstacleField) -> ObstacleField {
        let mut obstacles = self.obstacles.clone();
        obstacles.extend_from_slice(&other.obstacles);
        ObstacleField { obstacles, window: self.window, seed: self.seed }
    }
}

/// Samples the Boolean model in the sampling window of `link`.
pub fn sample_field(params: &BlockageModelParams, link: &LinkGeometry, seed: u64) -> ObstacleField {
    sample_field_in(params, sampling_window(link, params), seed)
}

/// Poisson count of centroids, uniform positions, independent widths and lengths.
pub fn sample_field_in(params: &BlockageModelParams, window: Window, seed: u64) -> ObstacleField {
    let mut rng = rng::stream(seed);
    let mean = params.lambda_o * window.area();
    let count = if mean > 0.0 {
        // mean is finite and positive here, so construction cannot fail
        Poisson::new(mean).map(|p| p.sample(&mut rng) as usize).unwrap_or(0)
    } else {
        0
    };
    let mut obstacles = Vec::with_capacity(count);
    for _ in 0..count {
        let cx = uniform_in(&mut rng, window.x_lo, window.x_hi);
        let cy = uniform_in(&mut rng, window.y_lo, window.y_hi);
        let w = params.width_dist.sample(&mut rng);
        let l = params.length_dist.sample(&mut rng);
        obstacles.push(AxisRect { cx, cy, half_w: w / 2.0, half_l: l / 2.0 });
    }
    ObstacleField { obstacles, window, seed }
}

fn uniform_in<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Which endpoints a trial or bound is conditioned to find outdoors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    #[default]
    Unconditional,
    SrcOutdoor,
    BothOutdoor,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Unconditional, Condition::SrcOutdoor, Condition::BothOutdoor];

    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Unconditional => "unconditional",
            Condition::SrcOutdoor => "src_outdoor",
            Condition::BothOutdoor => "both_outdoor",
        }
    }

    /// Whether the field satisfies the condition for this link.
    pub fn holds(&self, link: &LinkGeometry, field: &ObstacleField) -> bool {
        match self {
            Condition::Unconditional => true,
            Condition::SrcOutdoor => !is_indoor(link.source(), field),
            Condition::BothOutdoor => !is_indoor(link.source(), field) && !is_indoor(link.destination(), field),
        }
    }
}

/// Whether `p` is covered by some closed obstacle of the field.
pub fn is_indoor(p: Point, field: &ObstacleField) -> bool {
    field.obstacles.iter().any(|r| point_in_rect(p, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_params(lambda: f64) -> BlockageModelParams {
        BlockageModelParams::fixed(lambda, 10.0, 10.0).unwrap()
    }

    #[test]
    fn grain_accessors() {
        let d = GrainDistribution::deterministic(10.0).unwrap();
        assert_eq!((d.support_min(), d.support_max(), d.mean()), (10.0, 10.0, 10.0));
        let u = GrainDistribution::uniform(5.0, 15.0).unwrap();
        assert_eq!((u.support_min(), u.support_max(), u.mean()), (5.0, 15.0, 10.0));
        let p = GrainDistribution::pmf(vec![4.0, 8.0, 20.0], vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!((p.support_min(), p.support_max()), (4.0, 20.0));
        assert!((p.mean() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn grain_validation() {
        assert!(GrainDistribution::deterministic(0.0).is_err());
        assert!(GrainDistribution::uniform(5.0, 4.0).is_err());
        assert!(GrainDistribution::uniform(0.0, 4.0).is_err());
        assert!(GrainDistribution::pmf(vec![1.0], vec![0.9]).is_err());
        assert!(GrainDistribution::pmf(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(GrainDistribution::pmf(vec![], vec![]).is_err());
        assert!(GrainDistribution::pmf(vec![1.0, 2.0], vec![1.5, -0.5]).is_err());
        assert!(GrainDistribution::pmf(vec![1.0, 2.0], vec![0.5, 0.5 + 1e-13]).is_ok());
    }

    #[test]
    fn grain_json_forms() {
        let d: GrainDistribution = serde_json::from_str(r#"{"kind":"deterministic","value":10}"#).unwrap();
        assert_eq!(d, GrainDistribution::Deterministic { value: 10.0 });
        let u: GrainDistribution = serde_json::from_str(r#"{"kind":"uniform","lo":5,"hi":15}"#).unwrap();
        assert_eq!(u, GrainDistribution::Uniform { lo: 5.0, hi: 15.0 });
        let p: GrainDistribution = serde_json::from_str(r#"{"kind":"pmf","values":[1,2],"probs":[0.5,0.5]}"#).unwrap();
        assert_eq!(p.mean(), 1.5);
        assert!(serde_json::from_str::<GrainDistribution>(r#"{"kind":"uniform","lo":15,"hi":5}"#).is_err());
        let back: GrainDistribution = serde_json::from_str(&serde_json::to_string(&u).unwrap()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn window_matches_dilated_strip() {
        let w = sampling_window(&LinkGeometry::new(200.0, 20.0).unwrap(), &fig_params(1e-4));
        assert_eq!(w, Window { x_lo: -5.0, x_hi: 205.0, y_lo: -15.0, y_hi: 15.0 });
        assert_eq!(w.area(), 6300.0);
        let w0 = sampling_window(&LinkGeometry::new(200.0, 0.0).unwrap(), &fig_params(1e-4));
        assert_eq!(w0, Window { x_lo: -5.0, x_hi: 205.0, y_lo: -5.0, y_hi: 5.0 });
    }

    #[test]
    fn window_shrinks_to_strip_for_tiny_grains() {
        let tiny = BlockageModelParams::fixed(1e-4, 1e-9, 1e-9).unwrap();
        let w = sampling_window(&LinkGeometry::new(200.0, 20.0).unwrap(), &tiny);
        assert!((w.x_lo - 0.0).abs() < 1e-9 && (w.x_hi - 200.0).abs() < 1e-9);
        assert!((w.y_lo + 10.0).abs() < 1e-9 && (w.y_hi - 10.0).abs() < 1e-9);
    }

    #[test]
    fn centroids_just_outside_window_cannot_touch_strip() {
        let link = LinkGeometry::new(200.0, 20.0).unwrap();
        let w = sampling_window(&link, &fig_params(1e-4));
        let strip = link.strip();
        let eps = 1e-9;
        for (cx, cy) in [
            (w.x_lo - eps, 0.0),
            (w.x_hi + eps, 0.0),
            (100.0, w.y_lo - eps),
            (100.0, w.y_hi + eps),
            (w.x_lo - eps, w.y_hi + eps),
        ] {
            assert!(!strip.touches(&AxisRect::new(cx, cy, 5.0, 5.0).unwrap()));
        }
        // and on the boundary they do
        assert!(strip.touches(&AxisRect::new(w.x_lo, 0.0, 5.0, 5.0).unwrap()));
        assert!(strip.touches(&AxisRect::new(100.0, w.y_hi, 5.0, 5.0).unwrap()));
    }

    #[test]
    fn zero_intensity_is_empty() {
        let f = sample_field(&fig_params(0.0), &LinkGeometry::new(200.0, 20.0).unwrap(), 42);
        assert!(f.is_empty());
        assert!(!is_indoor(Point::new(0.0, 0.0), &f));
    }

    #[test]
    fn sampling_is_deterministic() {
        let link = LinkGeometry::new(200.0, 20.0).unwrap();
        let p = BlockageModelParams::new(
            1e-3,
            GrainDistribution::uniform(5.0, 15.0).unwrap(),
            GrainDistribution::pmf(vec![3.0, 9.0], vec![0.3, 0.7]).unwrap(),
        )
        .unwrap();
        let a = sample_field(&p, &link, 99);
        let b = sample_field(&p, &link, 99);
        assert_eq!(a, b);
        assert!(!a.is_empty());
        assert!(a.obstacles.iter().all(|r| a.window.contains(Point::new(r.cx, r.cy))));
        assert_ne!(a, sample_field(&p, &link, 100));
    }

    #[test]
    fn centroid_is_indoor() {
        let link = LinkGeometry::new(200.0, 20.0).unwrap();
        let f = (0..).map(|s| sample_field(&fig_params(1e-3), &link, s)).find(|f| !f.is_empty()).unwrap();
        let r = f.obstacles[0];
        assert!(is_indoor(Point::new(r.cx, r.cy), &f));
    }

    #[test]
    fn pmf_sampling_frequencies() {
        let p = GrainDistribution::pmf(vec![1.0, 2.0, 3.0], vec![0.2, 0.0, 0.8]).unwrap();
        let mut rng = rng::stream(5);
        let n = 20_000;
        let ones = (0..n).filter(|_| p.sample(&mut rng) == 1.0).count() as f64 / n as f64;
        assert!((ones - 0.2).abs() < 4.0 * (0.2f64 * 0.8 / n as f64).sqrt());
        assert_eq!(p.support_min(), 1.0);
        assert_eq!(p.support_max(), 3.0);
    }
}
