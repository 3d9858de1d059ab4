//! Exact ground truth: exhaustive 4-connected region fill and error metrics.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge_image::{mean_from_sums, EdgeImage, PixelPos, Point};
use crate::estimators::FeatureEstimate;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("seed {0:?} is an edge pixel or outside the image")]
    SeedOnEdge(PixelPos),
    #[error("reference region has zero area")]
    EmptyTruth,
}

/// A region of non-edge pixels with its exact centroid and pixel count.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionStats {
    pub pixels: BTreeSet<PixelPos>,
    pub centroid: Point,
    pub area: usize,
}

/// Ground truth for one object projection of a generated scene.
pub type GroundTruth = RegionStats;

impl RegionStats {
    pub fn from_pixels(pixels: BTreeSet<PixelPos>) -> Self {
        let (sx, sy) = pixels.iter().fold((0i128, 0i128), |(sx, sy), p| {
            (sx + i128::from(p.x), sy + i128::from(p.y))
        });
        let area = pixels.len();
        let centroid = if area == 0 {
            Point::default()
        } else {
            mean_from_sums(sx, sy, area as i128)
        };
        Self {
            pixels,
            centroid,
            area,
        }
    }
}

/// 4-connected region containing `seed`, bounded by edge pixels and the
/// image border.
pub fn flood_region(image: &EdgeImage, seed: PixelPos) -> Result<RegionStats, OracleError> {
    if image.is_edge(seed) {
        return Err(OracleError::SeedOnEdge(seed));
    }
    let w = image.width();
    let mut seen = vec![false; w * image.height()];
    let idx = |p: PixelPos| p.y as usize * w + p.x as usize;
    let mut pixels = BTreeSet::new();
    let mut queue = VecDeque::from([seed]);
    seen[idx(seed)] = true;
    while let Some(p) = queue.pop_front() {
        pixels.insert(p);
        for q in p.neighbors4() {
            if !image.is_edge(q) && !seen[idx(q)] {
                seen[idx(q)] = true;
                queue.push_back(q);
            }
        }
    }
    Ok(RegionStats::from_pixels(pixels))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Euclidean distance between estimated and true centroid, in pixels.
    pub centroid_error: f64,
    /// Estimated area over true area.
    pub area_ratio: f64,
}

pub fn compare(est: &FeatureEstimate, truth: &RegionStats) -> Result<ErrorReport, OracleError> {
    if truth.area == 0 {
        return Err(OracleError::EmptyTruth);
    }
    Ok(ErrorReport {
        centroid_error: est.centroid.distance(truth.centroid),
        area_ratio: est.area / truth.area as f64,
    })
}
