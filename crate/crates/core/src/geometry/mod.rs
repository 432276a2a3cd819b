//! Axis-aligned predicates and free-space connectivity inside a relay strip.
//!
//! The link runs along the x-axis from the source at `(0, 0)` to the
//! destination at `(d, 0)`. Obstacles are closed axis-aligned rectangles
//! whose `half_w` extent lies along the link and whose `half_l` extent lies
//! across it. A path is admissible when it stays inside the closed strip and
//! never enters the open interior of an obstacle.

mod compress;
mod raster;

pub use compress::{free_space_connected, CompressedGrid};
pub use raster::{grid_flood_fill_connected, grid_flood_fill_connected_capped, DEFAULT_MAX_GRID_CELLS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("{name} must be finite and positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite and non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("coordinate {name} is not finite")]
    NotFinite { name: &'static str },
    #[error("{role} ({x}, {y}) lies outside the closed strip")]
    OutsideStrip { role: &'static str, x: f64, y: f64 },
    #[error("grid of {cells} cells exceeds the cap of {cap}; use a coarser resolution")]
    GridTooLarge { cells: u128, cap: u64 },
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, GeometryError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(GeometryError::NonPositive { name, value })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64, GeometryError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(GeometryError::Negative { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Closed axis-aligned rectangle given by its centroid and half extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRect {
    pub cx: f64,
    pub cy: f64,
    /// Half extent along the link axis (x).
    pub half_w: f64,
    /// Half extent across the link axis (y).
    pub half_l: f64,
}

impl AxisRect {
    pub fn new(cx: f64, cy: f64, half_w: f64, half_l: f64) -> Result<Self, GeometryError> {
        if !cx.is_finite() {
            return Err(GeometryError::NotFinite { name: "cx" });
        }
        if !cy.is_finite() {
            return Err(GeometryError::NotFinite { name: "cy" });
        }
        Ok(Self { cx, cy, half_w: positive("half_w", half_w)?, half_l: positive("half_l", half_l)? })
    }

    /// Rectangle with full width `w` along the link and full length `l` across it.
    pub fn from_centroid_and_size(center: Point, w: f64, l: f64) -> Result<Self, GeometryError> {
        Self::new(center.x, center.y, w / 2.0, l / 2.0)
    }

    pub fn left(&self) -> f64 {
        self.cx - self.half_w
    }

    pub fn right(&self) -> f64 {
        self.cx + self.half_w
    }

    pub fn bottom(&self) -> f64 {
        self.cy - self.half_l
    }

    pub fn top(&self) -> f64 {
        self.cy + self.half_l
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_w
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_l
    }

    /// Strict membership in the open interior.
    pub fn interior_contains(&self, p: Point) -> bool {
        (p.x - self.cx).abs() < self.half_w && (p.y - self.cy).abs() < self.half_l
    }
}

/// The closed relay strip `[0, d] x [-kappa/2, kappa/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub d: f64,
    pub kappa: f64,
}

impl Strip {
    pub fn new(d: f64, kappa: f64) -> Result<Self, GeometryError> {
        Ok(Self { d: positive("d", d)?, kappa: non_negative("kappa", kappa)? })
    }

    pub fn half_kappa(&self) -> f64 {
        self.kappa / 2.0
    }

    pub fn source(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    pub fn destination(&self) -> Point {
        Point::new(self.d, 0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.d).contains(&p.x) && p.y.abs() <= self.half_kappa()
    }

    /// Whether the closed rectangle touches the closed strip.
    pub fn touches(&self, r: &AxisRect) -> bool {
        r.right() >= 0.0 && r.left() <= self.d && r.top() >= -self.half_kappa() && r.bottom() <= self.half_kappa()
    }
}

/// Result of a connectivity query. `witness` is present iff `connected`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityOutcome {
    pub connected: bool,
    pub witness: Option<Vec<Point>>,
}

impl ConnectivityOutcome {
    pub fn blocked() -> Self {
        Self { connected: false, witness: None }
    }

    pub fn through(path: Vec<Point>) -> Self {
        Self { connected: true, witness: Some(path) }
    }
}

/// Closed-set membership: boundary points count as inside.
pub fn point_in_rect(p: Point, r: &AxisRect) -> bool {
    (p.x - r.cx).abs() <= r.half_w && (p.y - r.cy).abs() <= r.half_l
}

/// Whether the closed rectangle meets the segment `y = 0, x in [x0, x1]`.
pub fn horizontal_segment_intersects_rect(x0: f64, x1: f64, r: &AxisRect) -> bool {
    debug_assert!(x0 <= x1);
    r.cy.abs() <= r.half_l && r.left() <= x1 && r.right() >= x0
}

/// Whether the closed segment `a -> b` meets the open interior of `r`.
///
/// Parametric clipping against the two open slabs of the rectangle.
pub fn segment_hits_interior(a: Point, b: Point, r: &AxisRect) -> bool {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (start, delta, center, half) in [(a.x, b.x - a.x, r.cx, r.half_w), (a.y, b.y - a.y, r.cy, r.half_l)] {
        if delta == 0.0 {
            if (start - center).abs() >= half {
                return false;
            }
        } else {
            let t0 = (center - half - start) / delta;
            let t1 = (center + half - start) / delta;
            let (t0, t1) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
            lo = lo.max(t0);
            hi = hi.min(t1);
        }
    }
    // (lo, hi) is open; it must meet [0, 1].
    lo < hi && lo < 1.0 && hi > 0.0
}

/// Checks a witness polyline: endpoints, strip containment and interior avoidance.
pub fn witness_is_sound(strip: &Strip, obstacles: &[AxisRect], src: Point, dst: Point, path: &[Point]) -> bool {
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        return false;
    };
    if *first != src || *last != dst {
        return false;
    }
    if !path.iter().all(|p| strip.contains(*p)) {
        return false;
    }
    if path.len() == 1 {
        return !obstacles.iter().any(|r| r.interior_contains(src));
    }
    path.windows(2).all(|seg| !obstacles.iter().any(|r| segment_hits_interior(seg[0], seg[1], r)))
}
