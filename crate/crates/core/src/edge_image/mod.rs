//! Edge-image bitmap, synthetic scenes with exact ground truth, edge gap
//! injection and PBM input/output.

mod degrade;
mod pbm;
mod scene;

pub use degrade::{degrade, plan_gaps, straight_gap_sites, DegradationSpec, Gap, GapPlan};
pub use pbm::{load_pbm, save_pbm};
pub use scene::{generate_scene, presets, SceneSpec, Shape};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer pixel coordinate: `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PixelPos {
    pub x: i32,
    pub y: i32,
}

impl PixelPos {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn distance(self, other: PixelPos) -> f64 {
        let dx = f64::from(self.x - other.x);
        let dy = f64::from(self.y - other.y);
        dx.hypot(dy)
    }

    pub fn to_point(self) -> Point {
        Point::new(f64::from(self.x), f64::from(self.y))
    }

    /// The four axis neighbours in the fixed order used by every fill.
    pub fn neighbors4(self) -> [PixelPos; 4] {
        [
            self.offset(1, 0),
            self.offset(-1, 0),
            self.offset(0, 1),
            self.offset(0, -1),
        ]
    }
}

impl From<(i32, i32)> for PixelPos {
    fn from((x, y): (i32, i32)) -> Self {
        Self::new(x, y)
    }
}

/// Sub-pixel coordinate pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Nearest pixel, ties rounded toward negative infinity.
    pub fn round_to_pixel(self) -> PixelPos {
        fn round_half_down(v: f64) -> i32 {
            (v - 0.5).ceil() as i32
        }
        PixelPos::new(round_half_down(self.x), round_half_down(self.y))
    }
}

/// Mean of a pixel multiset given integer coordinate sums; exact and
/// independent of summation order.
pub(crate) fn mean_from_sums(sum_x: i128, sum_y: i128, count: i128) -> Point {
    debug_assert!(count > 0);
    Point::new(sum_x as f64 / count as f64, sum_y as f64 / count as f64)
}

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("image dimensions {width}x{height} are below the 3x3 minimum")]
    TooSmall { width: usize, height: usize },
    #[error("edge buffer holds {actual} pixels, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("shape {index} is invalid or leaves less than a 2 px margin to the border")]
    ShapeOutOfBounds { index: usize },
    #[error("gap {index}: {reason}")]
    InvalidGap { index: usize, reason: String },
    #[error("malformed PBM at byte {offset}: {message}")]
    Format { offset: usize, message: String },
}

/// Rectangular binary edge map. Pixels outside the bitmap read as edges.
#[derive(Clone, PartialEq, Eq)]
pub struct EdgeImage {
    width: usize,
    height: usize,
    edges: Vec<bool>,
}

impl std::fmt::Debug for EdgeImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EdgeImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("edge_count", &self.edge_count())
            .finish()
    }
}

impl EdgeImage {
    /// An image with no edge pixels.
    pub fn blank(width: usize, height: usize) -> Result<Self, ImageError> {
        Self::from_edges(width, height, vec![false; width * height])
    }

    /// Builds an image from a row-major edge buffer.
    pub fn from_edges(width: usize, height: usize, edges: Vec<bool>) -> Result<Self, ImageError> {
        if width < 3 || height < 3 {
            return Err(ImageError::TooSmall { width, height });
        }
        if edges.len() != width * height {
            return Err(ImageError::BufferSize {
                expected: width * height,
                actual: edges.len(),
            });
        }
        Ok(Self {
            width,
            height,
            edges,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut is_edge: impl FnMut(PixelPos) -> bool,
    ) -> Result<Self, ImageError> {
        let mut edges = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                edges.push(is_edge(PixelPos::new(x as i32, y as i32)));
            }
        }
        Self::from_edges(width, height, edges)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, p: PixelPos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    fn index(&self, p: PixelPos) -> usize {
        p.y as usize * self.width + p.x as usize
    }

    /// Edge membership; anything outside the bitmap counts as an edge.
    #[inline]
    pub fn is_edge(&self, p: PixelPos) -> bool {
        !self.contains(p) || self.edges[self.index(p)]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    /// Edge pixels in row-major order.
    pub fn edge_pixels(&self) -> impl Iterator<Item = PixelPos> + '_ {
        let w = self.width;
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(move |(i, _)| PixelPos::new((i % w) as i32, (i / w) as i32))
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.edges
    }

    pub(crate) fn clear(&mut self, p: PixelPos) {
        if self.contains(p) {
            let i = self.index(p);
            self.edges[i] = false;
        }
    }

    /// Pixels whose edge flag differs between two images of equal size.
    pub fn diff(&self, other: &EdgeImage) -> Vec<PixelPos> {
        assert_eq!((self.width, self.height), (other.width, other.height));
        let w = self.width;
        self.edges
            .iter()
            .zip(&other.edges)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| PixelPos::new((i % w) as i32, (i / w) as i32))
            .collect()
    }
}
