//! Pixel-level movement: integer line stepping, barrier probes and
//! barrier-aware ray casting.
//!
//! Every move is a single 8-neighbour step from a source pixel to a target
//! pixel. A step is blocked when any pixel of the barrier, a line of `b`
//! pixels through the target perpendicular to the step, is an edge.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge_image::{EdgeImage, PixelPos};

#[derive(Debug, Error, PartialEq)]
pub enum TraversalError {
    #[error("barrier size {0} must be odd and at least 1")]
    BarrierSize(u32),
    #[error("{from:?} -> {to:?} is not a single 8-neighbour step")]
    NotNeighbors { from: PixelPos, to: PixelPos },
    #[error("ray origin {0:?} is an edge pixel or outside the image")]
    OriginOnEdge(PixelPos),
}

/// Ray heading in radians, normalized to `[0, 2pi)`. Angle 0 points along
/// +x and angles grow toward +y (image rows).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Direction(f64);

impl Direction {
    pub fn new(angle: f64) -> Self {
        let a = angle.rem_euclid(TAU);
        Self(if a >= TAU { 0.0 } else { a })
    }

    /// The `k`-th of `n` evenly spaced headings starting at angle 0.
    pub fn evenly_spaced(k: usize, n: usize) -> Self {
        Self::new(TAU * k as f64 / n as f64)
    }

    pub fn angle(self) -> f64 {
        self.0
    }
}

/// Unit 8-neighbourhood step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepVector {
    pub dx: i32,
    pub dy: i32,
}

impl StepVector {
    pub fn between(source: PixelPos, target: PixelPos) -> Result<Self, TraversalError> {
        let (dx, dy) = (target.x - source.x, target.y - source.y);
        if (dx, dy) == (0, 0) || dx.abs() > 1 || dy.abs() > 1 {
            return Err(TraversalError::NotNeighbors {
                from: source,
                to: target,
            });
        }
        Ok(Self { dx, dy })
    }

    /// Perpendicular step, rotated so that axis steps map to the other axis
    /// and diagonal steps to the opposite diagonal.
    pub fn perpendicular(self) -> Self {
        Self {
            dx: self.dy,
            dy: -self.dx,
        }
    }
}

/// Validated odd barrier size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct BarrierSize(u32);

impl BarrierSize {
    pub const SINGLE: BarrierSize = BarrierSize(1);

    pub fn new(b: u32) -> Result<Self, TraversalError> {
        if b % 2 == 1 {
            Ok(Self(b))
        } else {
            Err(TraversalError::BarrierSize(b))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn half(self) -> i32 {
        (self.0 / 2) as i32
    }
}

impl TryFrom<u32> for BarrierSize {
    type Error = TraversalError;
    fn try_from(b: u32) -> Result<Self, Self::Error> {
        Self::new(b)
    }
}

impl From<BarrierSize> for u32 {
    fn from(b: BarrierSize) -> u32 {
        b.0
    }
}

fn barrier_iter(
    step: StepVector,
    target: PixelPos,
    b: BarrierSize,
) -> impl Iterator<Item = PixelPos> {
    let p = step.perpendicular();
    let h = b.half();
    (-h..=h)
        .rev()
        .map(move |k| target.offset(k * p.dx, k * p.dy))
}

/// The `b` barrier pixels for the step `source -> target`, centred on the
/// target. Positions may lie outside any particular image.
pub fn barrier_pixels(
    source: PixelPos,
    target: PixelPos,
    b: u32,
) -> Result<Vec<PixelPos>, TraversalError> {
    let b = BarrierSize::new(b)?;
    let step = StepVector::between(source, target)?;
    Ok(barrier_iter(step, target, b).collect())
}

/// Whether the step `source -> target` is stopped by an edge on its barrier.
pub fn blocked(
    image: &EdgeImage,
    source: PixelPos,
    target: PixelPos,
    b: u32,
) -> Result<bool, TraversalError> {
    let b = BarrierSize::new(b)?;
    let step = StepVector::between(source, target)?;
    Ok(barrier_iter(step, target, b).any(|p| image.is_edge(p)))
}

/// Where a line is heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Toward {
    /// Unbounded ray along a heading.
    Direction(Direction),
    /// Finite segment ending at the pixel.
    Point(PixelPos),
}

impl From<Direction> for Toward {
    fn from(d: Direction) -> Self {
        Toward::Direction(d)
    }
}

impl From<PixelPos> for Toward {
    fn from(p: PixelPos) -> Self {
        Toward::Point(p)
    }
}

/// Distance to the integer aim point used for headings. Far enough that
/// any image is exited long before the aim point is reached.
const RAY_REACH: f64 = (1u32 << 20) as f64;

/// Integer midpoint line stepping; yields one `(source, target)` 8-neighbour
/// pair per major-axis pixel. On an exact midpoint tie the minor coordinate
/// is held, which keeps the stepping symmetric under reflection.
#[derive(Debug, Clone)]
pub struct LineSteps {
    cur: PixelPos,
    remaining: u32,
    major_x: bool,
    sx: i32,
    sy: i32,
    d_major: i64,
    d_minor: i64,
    decision: i64,
}

impl Iterator for LineSteps {
    type Item = (PixelPos, PixelPos);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let source = self.cur;
        let mut minor = false;
        if self.decision > 0 {
            minor = true;
            self.decision -= 2 * self.d_major;
        }
        self.decision += 2 * self.d_minor;
        let (dx, dy) = if self.major_x {
            (self.sx, if minor { self.sy } else { 0 })
        } else {
            (if minor { self.sx } else { 0 }, self.sy)
        };
        self.cur = source.offset(dx, dy);
        Some((source, self.cur))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

pub fn step_line(from: PixelPos, toward: impl Into<Toward>) -> LineSteps {
    let to = match toward.into() {
        Toward::Point(p) => p,
        Toward::Direction(d) => {
            let (s, c) = d.angle().sin_cos();
            from.offset(
                (RAY_REACH * c).round() as i32,
                (RAY_REACH * s).round() as i32,
            )
        }
    };
    let dx = i64::from(to.x - from.x).abs();
    let dy = i64::from(to.y - from.y).abs();
    let major_x = dx >= dy;
    let (d_major, d_minor) = if major_x { (dx, dy) } else { (dy, dx) };
    LineSteps {
        cur: from,
        remaining: d_major as u32,
        major_x,
        sx: (to.x - from.x).signum(),
        sy: (to.y - from.y).signum(),
        d_major,
        d_minor,
        decision: 2 * d_minor - d_major,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayHit {
    /// Last accepted pixel on the ray.
    pub hit: PixelPos,
    /// Euclidean distance from the origin to `hit`.
    pub length: f64,
}

/// Barrier-checked movement over one image, counting every pixel probe.
/// The probe count is the machine-independent work measure.
#[derive(Debug)]
pub struct Walker<'a> {
    image: &'a EdgeImage,
    barrier: BarrierSize,
    probes: u64,
}

impl<'a> Walker<'a> {
    pub fn new(image: &'a EdgeImage, barrier: BarrierSize) -> Self {
        Self {
            image,
            barrier,
            probes: 0,
        }
    }

    pub fn image(&self) -> &'a EdgeImage {
        self.image
    }

    pub fn barrier(&self) -> BarrierSize {
        self.barrier
    }

    pub fn probes(&self) -> u64 {
        self.probes
    }

    /// `source` and `target` must be 8-neighbours.
    pub fn step_allowed(&mut self, source: PixelPos, target: PixelPos) -> bool {
        let step = StepVector {
            dx: target.x - source.x,
            dy: target.y - source.y,
        };
        debug_assert!(
            step.dx.abs() <= 1 && step.dy.abs() <= 1 && step != StepVector { dx: 0, dy: 0 }
        );
        for p in barrier_iter(step, target, self.barrier) {
            self.probes += 1;
            if self.image.is_edge(p) {
                return false;
            }
        }
        true
    }

    /// Follows the line until a blocked step or its end. Returns the last
    /// accepted pixel; every accepted pixel is appended to `path`.
    pub fn advance(&mut self, line: LineSteps, path: &mut Vec<PixelPos>) -> Option<PixelPos> {
        let mut last = None;
        for (s, t) in line {
            if !self.step_allowed(s, t) {
                break;
            }
            path.push(t);
            last = Some(t);
        }
        last
    }

    /// Casts a ray; `path` receives the origin followed by every accepted
    /// pixel. The origin itself is never barrier-checked.
    pub fn cast(&mut self, origin: PixelPos, dir: Direction, path: &mut Vec<PixelPos>) -> RayHit {
        path.push(origin);
        let hit = self.advance(step_line(origin, dir), path).unwrap_or(origin);
        RayHit {
            hit,
            length: origin.distance(hit),
        }
    }
}

/// Casts one ray from a non-edge origin.
pub fn cast_ray(
    image: &EdgeImage,
    origin: PixelPos,
    dir: Direction,
    b: u32,
) -> Result<RayHit, TraversalError> {
    let b = BarrierSize::new(b)?;
    if image.is_edge(origin) {
        return Err(TraversalError::OriginOnEdge(origin));
    }
    Ok(Walker::new(image, b).cast(origin, dir, &mut Vec::new()))
}
