//! Connectivity of a source/destination pair that may route through relays
//! inside a strip of width `kappa` around the line of sight, when obstacles
//! form a Boolean model of axis-aligned rectangles.
//!
//! The crate has two halves that are meant to be compared:
//!
//! * [`montecarlo`] samples obstacle fields ([`model`]) and decides each
//!   realization exactly with a coordinate-compressed free-space search
//!   ([`geometry`]);
//! * [`analytics`] evaluates the single-obstacle upper bounds and the exact
//!   line-of-sight probability in closed form or by quadrature.
//!
//! [`experiment`] and [`plot`] turn both into CSV tables and SVG charts, and
//! [`cli`] wraps them in the `mmwave-conn` binary.

pub mod analytics;
pub mod cli;
pub mod experiment;
pub mod geometry;
pub mod model;
pub mod montecarlo;
pub mod plot;
pub mod rng;
pub mod stats;

pub use analytics::{
    area_kernel, conditional_upper_bound, connectivity_upper_bound, fixed_size_upper_bound, optimal_window_bound,
    p_los, BoundKind, BoundResult, QuadratureSpec,
};
pub use geometry::{free_space_connected, grid_flood_fill_connected, AxisRect, ConnectivityOutcome, Point, Strip};
pub use model::{
    is_indoor, sample_field, sampling_window, BlockageModelParams, Condition, GrainDistribution, LinkGeometry,
    ObstacleField,
};
pub use montecarlo::{estimate_connectivity, estimate_p_los, paired_kappa_comparison, MCEstimate};
