use crate::edge_image::{mean_from_sums, EdgeImage, PixelPos, Point};
use crate::traversal::{step_line, Direction, Walker};

use super::{EstimateError, EstimatorConfig, RayTrace, RelocationTrace};

/// Moves `point` along the line to the centroid's pixel until it gets there
/// or the next step is blocked.
pub(crate) fn displace(
    walker: &mut Walker<'_>,
    point: PixelPos,
    centroid: Point,
    path: &mut Vec<PixelPos>,
) -> PixelPos {
    let goal = centroid.round_to_pixel();
    if goal == point {
        return point;
    }
    walker
        .advance(step_line(point, goal), path)
        .unwrap_or(point)
}

/// Casts `n` evenly spaced rays from `origin` at recast level `level`.
pub(crate) fn cast_star(
    walker: &mut Walker<'_>,
    origin: PixelPos,
    n: u32,
    level: u32,
    weight: u64,
    out: &mut Vec<RayTrace>,
) {
    for k in 0..n as usize {
        let dir = Direction::evenly_spaced(k, n as usize);
        let mut path = Vec::new();
        let hit = walker.cast(origin, dir, &mut path);
        out.push(RayTrace {
            level,
            weight,
            angle: dir.angle(),
            path,
            hit: hit.hit,
            length: hit.length,
        });
    }
}

/// Casts `n` rays from `point` and walks toward the mean hit position,
/// stopping before any blocked step so the result never crosses an edge.
pub(crate) fn relocate(walker: &mut Walker<'_>, point: PixelPos, n: u32) -> RelocationTrace {
    let before = walker.probes();
    let mut rays = Vec::new();
    cast_star(walker, point, n, 1, 1, &mut rays);
    let (sx, sy) = rays.iter().fold((0i128, 0i128), |(sx, sy), r| {
        (sx + i128::from(r.hit.x), sy + i128::from(r.hit.y))
    });
    let mean_hit = mean_from_sums(sx, sy, rays.len() as i128);
    let goal = mean_hit.round_to_pixel();
    let mut approach = Vec::new();
    let result = if goal == point {
        point
    } else {
        walker
            .advance(step_line(point, goal), &mut approach)
            .unwrap_or(point)
    };
    RelocationTrace {
        start: point,
        rays,
        mean_hit,
        approach,
        result,
        probes: walker.probes() - before,
    }
}

/// Shared inner-point update: displace toward `centroid` (edge-stopped),
/// then relocate at the mean of `cfg.n` ray hits cast from there.
pub fn recenter_inner_point(
    image: &EdgeImage,
    point: PixelPos,
    centroid: Point,
    cfg: &EstimatorConfig,
) -> Result<PixelPos, EstimateError> {
    cfg.validate()?;
    super::check_inner(image, point)?;
    let mut walker = Walker::new(image, cfg.barrier()?);
    let moved = displace(&mut walker, point, centroid, &mut Vec::new());
    Ok(relocate(&mut walker, moved, cfg.n).result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge_image::{generate_scene, presets};
    use crate::estimators::Technique;

    #[test]
    fn centre_of_disk_stays_put() {
        let (img, _) = generate_scene(&presets::disk()).unwrap();
        let cfg = EstimatorConfig {
            b: 1,
            ..EstimatorConfig::new(Technique::NRay)
        };
        let c = PixelPos::new(50, 50);
        assert_eq!(
            recenter_inner_point(&img, c, c.to_point(), &cfg).unwrap(),
            c
        );
    }

    #[test]
    fn displacement_stops_before_an_edge() {
        // wall at column 6, centroid beyond it
        let img = EdgeImage::from_fn(13, 9, |p| p.x == 6).unwrap();
        let mut walker = Walker::new(&img, crate::traversal::BarrierSize::SINGLE);
        let moved = displace(
            &mut walker,
            PixelPos::new(5, 4),
            Point::new(10.0, 4.0),
            &mut Vec::new(),
        );
        assert_eq!(moved, PixelPos::new(5, 4));
        let moved = displace(
            &mut walker,
            PixelPos::new(1, 4),
            Point::new(10.0, 4.0),
            &mut Vec::new(),
        );
        assert_eq!(moved, PixelPos::new(5, 4));
    }

    #[test]
    fn recentred_point_never_crosses_the_wall() {
        let img = EdgeImage::from_fn(13, 9, |p| p.x == 6).unwrap();
        let cfg = EstimatorConfig {
            b: 1,
            n: 16,
            ..EstimatorConfig::default()
        };
        let out =
            recenter_inner_point(&img, PixelPos::new(5, 4), Point::new(10.0, 4.0), &cfg).unwrap();
        assert!(out.x < 6 && !img.is_edge(out));
    }
}
