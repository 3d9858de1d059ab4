use serde::{Deserialize, Serialize};

use super::{EdgeImage, ImageError, PixelPos};
use crate::oracle::{flood_region, GroundTruth};

/// Filled primitive in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Pixels with `(x-cx)^2 + (y-cy)^2 <= r^2`.
    Disk { center: PixelPos, radius: u32 },
    /// Axis-aligned, covering columns `corner.x .. corner.x + width`.
    Rectangle {
        corner: PixelPos,
        width: u32,
        height: u32,
    },
    /// Pixels within `radius` of the segment `a`-`b`.
    Capsule {
        a: PixelPos,
        b: PixelPos,
        radius: u32,
    },
}

impl Shape {
    /// Inclusive bounding box `(min, max)`.
    fn bounds(&self) -> Option<(PixelPos, PixelPos)> {
        match *self {
            Shape::Disk { center, radius } => {
                let r = radius as i32;
                Some((center.offset(-r, -r), center.offset(r, r)))
            }
            Shape::Rectangle {
                corner,
                width,
                height,
            } => {
                if width == 0 || height == 0 {
                    return None;
                }
                Some((corner, corner.offset(width as i32 - 1, height as i32 - 1)))
            }
            Shape::Capsule { a, b, radius } => {
                let r = radius as i32;
                Some((
                    PixelPos::new(a.x.min(b.x) - r, a.y.min(b.y) - r),
                    PixelPos::new(a.x.max(b.x) + r, a.y.max(b.y) + r),
                ))
            }
        }
    }

    pub fn contains(&self, p: PixelPos) -> bool {
        match *self {
            Shape::Disk { center, radius } => {
                let dx = i64::from(p.x - center.x);
                let dy = i64::from(p.y - center.y);
                dx * dx + dy * dy <= i64::from(radius) * i64::from(radius)
            }
            Shape::Rectangle {
                corner,
                width,
                height,
            } => {
                p.x >= corner.x
                    && p.y >= corner.y
                    && i64::from(p.x - corner.x) < i64::from(width)
                    && i64::from(p.y - corner.y) < i64::from(height)
            }
            Shape::Capsule { a, b, radius } => {
                segment_distance_sq_le(p, a, b, i64::from(radius) * i64::from(radius))
            }
        }
    }
}

/// `dist(p, segment ab)^2 <= r2`, in exact integer arithmetic.
fn segment_distance_sq_le(p: PixelPos, a: PixelPos, b: PixelPos, r2: i64) -> bool {
    let (abx, aby) = (i64::from(b.x - a.x), i64::from(b.y - a.y));
    let (apx, apy) = (i64::from(p.x - a.x), i64::from(p.y - a.y));
    let len2 = abx * abx + aby * aby;
    let dot = apx * abx + apy * aby;
    let ap2 = apx * apx + apy * apy;
    if len2 == 0 || dot <= 0 {
        return ap2 <= r2;
    }
    if dot >= len2 {
        let (bpx, bpy) = (i64::from(p.x - b.x), i64::from(p.y - b.y));
        return bpx * bpx + bpy * bpy <= r2;
    }
    // perpendicular foot inside the segment: d^2 = ap2 - dot^2 / len2
    i128::from(ap2) * i128::from(len2) - i128::from(dot) * i128::from(dot)
        <= i128::from(r2) * i128::from(len2)
}

/// Scene description: image size plus the shapes whose union forms the
/// object projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub shapes: Vec<Shape>,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), ImageError> {
        if self.width < 3 || self.height < 3 {
            return Err(ImageError::TooSmall {
                width: self.width,
                height: self.height,
            });
        }
        let (w, h) = (self.width as i64, self.height as i64);
        for (index, shape) in self.shapes.iter().enumerate() {
            let Some((lo, hi)) = shape.bounds() else {
                return Err(ImageError::ShapeOutOfBounds { index });
            };
            let radius_ok = match shape {
                Shape::Disk { radius, .. } | Shape::Capsule { radius, .. } => *radius >= 1,
                Shape::Rectangle { .. } => true,
            };
            let inside = i64::from(lo.x) >= 2
                && i64::from(lo.y) >= 2
                && i64::from(hi.x) <= w - 3
                && i64::from(hi.y) <= h - 3;
            if !radius_ok || !inside {
                return Err(ImageError::ShapeOutOfBounds { index });
            }
        }
        Ok(())
    }

    fn union_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.width * self.height];
        for y in 0..self.height {
            for x in 0..self.width {
                let p = PixelPos::new(x as i32, y as i32);
                mask[y * self.width + x] = self.shapes.iter().any(|s| s.contains(p));
            }
        }
        mask
    }
}

/// Rasterizes the shape union and marks its boundary as edges.
///
/// A union pixel is a boundary pixel when any of its eight neighbours lies
/// outside the union, which yields 4-connected closed contours. Returns one
/// ground truth per enclosed interior region, ordered by the region's first
/// pixel in row-major order.
pub fn generate_scene(spec: &SceneSpec) -> Result<(EdgeImage, Vec<GroundTruth>), ImageError> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mask = spec.union_mask();
    let inside = |x: i64, y: i64| {
        x >= 0
            && y >= 0
            && (x as usize) < w
            && (y as usize) < h
            && mask[y as usize * w + x as usize]
    };
    let mut edges = vec![false; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if !inside(x, y) {
                continue;
            }
            let boundary = (-1..=1)
                .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
                .any(|(dx, dy)| !inside(x + dx, y + dy));
            edges[y as usize * w + x as usize] = boundary;
        }
    }
    let image = EdgeImage::from_edges(w, h, edges)?;

    let mut assigned = vec![false; w * h];
    let mut truths = Vec::new();
    for i in 0..w * h {
        if !mask[i] || assigned[i] || image.as_slice()[i] {
            continue;
        }
        let seed = PixelPos::new((i % w) as i32, (i / w) as i32);
        let truth = flood_region(&image, seed).expect("interior seed is not an edge");
        for p in &truth.pixels {
            assigned[p.y as usize * w + p.x as usize] = true;
        }
        truths.push(truth);
    }
    Ok((image, truths))
}

/// Named reference scenes.
pub mod presets {
    use super::{SceneSpec, Shape};
    use crate::edge_image::PixelPos;

    pub const NAMES: [&str; 3] = ["disk", "rectangle", "hand-v1"];

    /// Convex case: radius-30 disk centred in a 101x101 image.
    pub fn disk() -> SceneSpec {
        SceneSpec {
            width: 101,
            height: 101,
            shapes: vec![Shape::Disk {
                center: PixelPos::new(50, 50),
                radius: 30,
            }],
        }
    }

    pub fn rectangle() -> SceneSpec {
        SceneSpec {
            width: 51,
            height: 51,
            shapes: vec![Shape::Rectangle {
                corner: PixelPos::new(10, 10),
                width: 31,
                height: 21,
            }],
        }
    }

    /// Non-convex case: palm disk with four finger capsules.
    pub fn hand_v1() -> SceneSpec {
        let finger = |a: (i32, i32), b: (i32, i32)| Shape::Capsule {
            a: PixelPos::from(a),
            b: PixelPos::from(b),
            radius: 6,
        };
        SceneSpec {
            width: 160,
            height: 160,
            shapes: vec![
                Shape::Disk {
                    center: PixelPos::new(80, 110),
                    radius: 34,
                },
                finger((58, 85), (44, 30)),
                finger((78, 80), (76, 22)),
                finger((98, 82), (108, 28)),
                finger((112, 92), (134, 48)),
            ],
        }
    }

    /// A pixel well inside the middle finger of [`hand_v1`].
    pub const HAND_V1_FINGER_POINT: PixelPos = PixelPos::new(76, 30);

    pub fn by_name(name: &str) -> Option<SceneSpec> {
        match name {
            "disk" => Some(disk()),
            "rectangle" | "rect" => Some(rectangle()),
            "hand-v1" => Some(hand_v1()),
            _ => None,
        }
    }
}
