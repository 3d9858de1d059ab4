//! Object projection feature estimators.
//!
//! Every technique takes an edge image and an inner point and returns a
//! centroid, an area proxy and an updated inner point, together with a
//! [`Trace`] of what was visited. All of them accept a barrier size; with
//! `b = 1` the barrier check reduces to the plain single-pixel edge test.

mod fill;
mod rays;
mod recenter;

pub use fill::{estimate_grid_cast, estimate_pixel_fill};
pub use rays::{
    estimate_iter_n_ray, estimate_iter_ny_raster, estimate_iter_ny_ray, estimate_n_ray,
};
pub use recenter::recenter_inner_point;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge_image::{EdgeImage, PixelPos, Point};
use crate::traversal::BarrierSize;

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    /// The inner point is not inside any projection; the tracker has lost
    /// the object.
    #[error("inner point {0:?} is an edge pixel or outside the image")]
    LostObject(PixelPos),
    #[error("invalid estimator configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    NRay,
    IterNRay,
    IterNyRay,
    IterNyRaster,
    PixelFill,
    GridCast,
}

impl Technique {
    pub const ALL: [Technique; 6] = [
        Technique::NRay,
        Technique::IterNRay,
        Technique::IterNyRay,
        Technique::IterNyRaster,
        Technique::PixelFill,
        Technique::GridCast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technique::NRay => "n_ray",
            Technique::IterNRay => "iter_n_ray",
            Technique::IterNyRay => "iter_ny_ray",
            Technique::IterNyRaster => "iter_ny_raster",
            Technique::PixelFill => "pixel_fill",
            Technique::GridCast => "grid_cast",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = EstimateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Technique::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| EstimateError::Config(format!("unknown technique `{s}`")))
    }
}

/// Technique selector plus every tuning knob.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub technique: Technique,
    /// Rays per cast (also used by the final re-centering cast).
    pub n: u32,
    /// Recast depth for the n^y techniques.
    pub y: u32,
    /// Block size (rasterization) or lattice spacing (grid casting).
    pub m: u32,
    /// Barrier size, odd.
    pub b: u32,
    pub max_iterations: u32,
    /// An iteration is converged when both the centroid and the inner point
    /// moved less than this many pixels.
    pub epsilon: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            technique: Technique::NRay,
            n: 32,
            y: 2,
            m: 8,
            b: 3,
            max_iterations: 10,
            epsilon: 0.5,
        }
    }
}

/// Upper bound on the n^y fan-out of a single iteration.
const MAX_FAN_OUT: u64 = 1 << 32;

impl EstimatorConfig {
    pub fn new(technique: Technique) -> Self {
        Self {
            technique,
            ..Self::default()
        }
    }

    pub fn barrier(&self) -> Result<BarrierSize, EstimateError> {
        BarrierSize::new(self.b).map_err(|e| EstimateError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), EstimateError> {
        let bad = |msg: String| Err(EstimateError::Config(msg));
        self.barrier()?;
        if self.n < 3 {
            return bad(format!("n = {} must be at least 3", self.n));
        }
        if self.y < 1 {
            return bad("y must be at least 1".into());
        }
        if u64::from(self.n)
            .checked_pow(self.y)
            .is_none_or(|f| f > MAX_FAN_OUT)
        {
            return bad(format!("fan-out {}^{} is too large", self.n, self.y));
        }
        if self.m < 1 {
            return bad("m must be at least 1".into());
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad(format!(
                "epsilon = {} must be finite and non-negative",
                self.epsilon
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureEstimate {
    pub centroid: Point,
    /// Ray-length sum, selected block area or pixel count, by technique.
    pub area: f64,
    pub inner_point: PixelPos,
}

/// Index of an `m x m` block in the lattice anchored at the image origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Block {
    pub col: i32,
    pub row: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    /// Recast level, starting at 1 for rays leaving the inner point.
    pub level: u32,
    /// Number of level-`level` rays this cast stands for.
    pub weight: u64,
    pub angle: f64,
    /// Origin followed by every accepted pixel.
    pub path: Vec<PixelPos>,
    pub hit: PixelPos,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub inner_point: PixelPos,
    pub rays: Vec<RayTrace>,
    /// Filled pixels or reached lattice points, in visit order.
    pub marked: Vec<PixelPos>,
    /// Lattice expansions that succeeded (grid casting).
    pub grid_links: Vec<(PixelPos, PixelPos)>,
    /// Persistent block selection after this iteration, sorted.
    pub blocks: Vec<Block>,
    pub centroid: Point,
    pub area: f64,
    /// Pixels walked while moving the inner point toward the centroid.
    pub displacement: Vec<PixelPos>,
    pub displaced_to: PixelPos,
    pub probes: u64,
}

impl IterationTrace {
    fn new(inner_point: PixelPos) -> Self {
        Self {
            inner_point,
            rays: Vec::new(),
            marked: Vec::new(),
            grid_links: Vec::new(),
            blocks: Vec::new(),
            centroid: Point::default(),
            area: 0.0,
            displacement: Vec::new(),
            displaced_to: inner_point,
            probes: 0,
        }
    }
}

/// The closing ray cast that centres the inner point in its local area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelocationTrace {
    pub start: PixelPos,
    pub rays: Vec<RayTrace>,
    pub mean_hit: Point,
    pub approach: Vec<PixelPos>,
    pub result: PixelPos,
    pub probes: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub technique: Option<Technique>,
    pub iterations: Vec<IterationTrace>,
    pub relocation: Option<RelocationTrace>,
    /// Block edge length for rasterized runs.
    pub block_size: Option<u32>,
    /// The loop stopped on the epsilon test rather than the iteration cap.
    pub converged: bool,
}

impl Trace {
    /// Total barrier pixel probes of the run.
    pub fn work(&self) -> u64 {
        self.iterations.iter().map(|i| i.probes).sum::<u64>()
            + self.relocation.as_ref().map_or(0, |r| r.probes)
    }

    /// Inner point positions in the order they were taken.
    pub fn trajectory(&self) -> Vec<PixelPos> {
        let mut out: Vec<PixelPos> = Vec::new();
        let mut push = |p: PixelPos| {
            if out.last() != Some(&p) {
                out.push(p);
            }
        };
        for it in &self.iterations {
            push(it.inner_point);
            push(it.displaced_to);
        }
        if let Some(r) = &self.relocation {
            push(r.result);
        }
        out
    }
}

pub(crate) fn check_inner(image: &EdgeImage, inner: PixelPos) -> Result<(), EstimateError> {
    if image.is_edge(inner) {
        Err(EstimateError::LostObject(inner))
    } else {
        Ok(())
    }
}

/// Runs the technique selected by `cfg.technique`.
pub fn estimate(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    match cfg.technique {
        Technique::NRay => estimate_n_ray(image, inner, cfg),
        Technique::IterNRay => estimate_iter_n_ray(image, inner, cfg),
        Technique::IterNyRay => estimate_iter_ny_ray(image, inner, cfg),
        Technique::IterNyRaster => estimate_iter_ny_raster(image, inner, cfg),
        Technique::PixelFill => estimate_pixel_fill(image, inner, cfg),
        Technique::GridCast => estimate_grid_cast(image, inner, cfg),
    }
}
