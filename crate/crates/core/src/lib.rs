//! Object projection feature estimation on edge images.
//!
//! Given a binary edge image and an inner point known to lie inside an
//! object's projection, the estimators in [`estimators`] compute the
//! projection's centroid, an area proxy, and an updated inner point. Every
//! technique supports barrier probes (see [`traversal`]), which make the
//! casting insensitive to short gaps in the edge map.
//!
//! [`edge_image`] provides the bitmap type, synthetic scenes with exact
//! ground truth and edge gap injection; [`oracle`] computes the reference
//! regions the estimators are measured against.

pub mod edge_image;
pub mod estimators;
pub mod oracle;
pub mod traversal;

pub use edge_image::{EdgeImage, ImageError, PixelPos, Point};
pub use estimators::{estimate, EstimateError, EstimatorConfig, FeatureEstimate, Technique, Trace};
pub use oracle::{compare, flood_region, ErrorReport, GroundTruth, RegionStats};
pub use traversal::{BarrierSize, Direction, RayHit};
