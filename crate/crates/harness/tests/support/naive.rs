//! Straightforward reference versions of the six estimators with the plain
//! "is the next pixel an edge" test. Written without the library's walker so
//! the barrier code path can be checked against it.

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::TAU;

use castfeat::{EdgeImage, EstimatorConfig, FeatureEstimate, PixelPos, Point, Technique};

const REACH: f64 = 1_048_576.0;

fn round_pixel(p: Point) -> PixelPos {
    // nearest integer, exact halves go down
    let r = |v: f64| {
        let f = v.floor();
        if v - f > 0.5 {
            f as i32 + 1
        } else {
            f as i32
        }
    };
    PixelPos::new(r(p.x), r(p.y))
}

/// Pixels after `from` on the segment to `to`, one per major-axis step. The
/// minor offset after `k` steps is `k * minor / major` rounded to nearest
/// with halves rounded down.
fn segment(from: PixelPos, to: PixelPos) -> impl Iterator<Item = PixelPos> {
    let (dx, dy) = (i64::from(to.x - from.x), i64::from(to.y - from.y));
    let (major, minor) = (dx.abs().max(dy.abs()), dx.abs().min(dy.abs()));
    let x_major = dx.abs() >= dy.abs();
    let (sx, sy) = (dx.signum(), dy.signum());
    (1..=major).map(move |k| {
        // ceil((2 k minor - major) / (2 major))
        let num = 2 * k * minor - major;
        let off = num.div_euclid(2 * major) + i64::from(num.rem_euclid(2 * major) != 0);
        let (ox, oy) = if x_major {
            (k * sx, off * sy)
        } else {
            (off * sx, k * sy)
        };
        PixelPos::new(from.x + ox as i32, from.y + oy as i32)
    })
}

/// Walks the segment while pixels are free; returns the visited pixels.
fn walk(img: &EdgeImage, from: PixelPos, to: PixelPos) -> Vec<PixelPos> {
    segment(from, to).take_while(|&p| !img.is_edge(p)).collect()
}

struct Ray {
    path: Vec<PixelPos>,
    hit: PixelPos,
    length: f64,
}

fn ray(img: &EdgeImage, origin: PixelPos, k: u32, n: u32) -> Ray {
    let angle = TAU * f64::from(k) / f64::from(n);
    let aim = PixelPos::new(
        origin.x + (REACH * angle.cos()).round() as i32,
        origin.y + (REACH * angle.sin()).round() as i32,
    );
    let mut path = vec![origin];
    path.extend(walk(img, origin, aim));
    let hit = *path.last().unwrap();
    let length = f64::from(hit.x - origin.x).hypot(f64::from(hit.y - origin.y));
    Ray { path, hit, length }
}

fn mean(points: impl IntoIterator<Item = (PixelPos, i64)>) -> Point {
    let (mut sx, mut sy, mut total) = (0i64, 0i64, 0i64);
    for (p, w) in points {
        sx += w * i64::from(p.x);
        sy += w * i64::from(p.y);
        total += w;
    }
    Point::new(sx as f64 / total as f64, sy as f64 / total as f64)
}

fn move_toward(img: &EdgeImage, point: PixelPos, goal: PixelPos) -> PixelPos {
    walk(img, point, goal).last().copied().unwrap_or(point)
}

fn finish(img: &EdgeImage, point: PixelPos, n: u32) -> PixelPos {
    let hits: Vec<(PixelPos, i64)> = (0..n).map(|k| (ray(img, point, k, n).hit, 1)).collect();
    move_toward(img, point, round_pixel(mean(hits)))
}

fn casting(img: &EdgeImage, inner: PixelPos, cfg: &EstimatorConfig) -> FeatureEstimate {
    let (depth, iterations, raster) = match cfg.technique {
        Technique::NRay => (1, 1, false),
        Technique::IterNRay => (1, cfg.max_iterations, false),
        Technique::IterNyRay => (cfg.y, cfg.max_iterations, false),
        _ => (cfg.y, cfg.max_iterations, true),
    };
    let m = cfg.m as i32;
    let (w, h) = (img.width() as i32, img.height() as i32);
    let mut blocks: BTreeSet<(i32, i32)> = BTreeSet::new();
    let mut point = inner;
    let mut reference = inner.to_point();
    let (mut centroid, mut area) = (Point::default(), 0.0);

    for _ in 0..iterations {
        let mut origins: Vec<(PixelPos, i64)> = vec![(point, 1)];
        let mut level_rays: Vec<(Ray, i64)> = Vec::new();
        for _ in 0..depth {
            let mut grouped: Vec<(PixelPos, i64)> = Vec::new();
            for (o, wgt) in origins {
                match grouped.iter_mut().find(|(q, _)| *q == o) {
                    Some(entry) => entry.1 += wgt,
                    None => grouped.push((o, wgt)),
                }
            }
            level_rays = grouped
                .iter()
                .flat_map(|&(o, wgt)| (0..cfg.n).map(move |k| (o, k, wgt)))
                .map(|(o, k, wgt)| (ray(img, o, k, cfg.n), wgt))
                .collect();
            if raster {
                for (r, _) in &level_rays {
                    blocks.extend(
                        r.path
                            .iter()
                            .map(|p| (p.x.div_euclid(m), p.y.div_euclid(m))),
                    );
                }
            }
            origins = level_rays.iter().map(|(r, wgt)| (r.hit, *wgt)).collect();
        }
        if raster {
            let (mut sx, mut sy) = (0i64, 0i64);
            for &(c, r) in &blocks {
                sx += i64::from(c * m + ((c + 1) * m).min(w) - 1);
                sy += i64::from(r * m + ((r + 1) * m).min(h) - 1);
            }
            let k = 2 * blocks.len() as i64;
            centroid = Point::new(sx as f64 / k as f64, sy as f64 / k as f64);
            area = f64::from(cfg.m * cfg.m) * blocks.len() as f64;
        } else {
            centroid = mean(level_rays.iter().map(|(r, wgt)| (r.hit, *wgt)));
            area = level_rays
                .iter()
                .fold(0.0, |acc, (r, wgt)| acc + *wgt as f64 * r.length);
        }
        let goal = round_pixel(centroid);
        let next = if goal == point {
            point
        } else {
            move_toward(img, point, goal)
        };
        let settled =
            centroid.distance(reference) < cfg.epsilon && point.distance(next) < cfg.epsilon;
        reference = centroid;
        point = next;
        if settled {
            break;
        }
    }
    FeatureEstimate {
        centroid,
        area,
        inner_point: finish(img, point, cfg.n),
    }
}

/// Every point reachable from `inner` by `stride`-pixel axis moves whose
/// pixels are all free.
fn reachable(img: &EdgeImage, inner: PixelPos, stride: i32) -> HashSet<PixelPos> {
    let mut seen = HashSet::from([inner]);
    let mut stack = vec![inner];
    while let Some(p) = stack.pop() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let q = PixelPos::new(p.x + dx * stride, p.y + dy * stride);
            let free =
                (1..=stride).all(|i| !img.is_edge(PixelPos::new(p.x + dx * i, p.y + dy * i)));
            if free && seen.insert(q) {
                stack.push(q);
            }
        }
    }
    seen
}

fn filling(img: &EdgeImage, inner: PixelPos, cfg: &EstimatorConfig) -> FeatureEstimate {
    let stride = if cfg.technique == Technique::GridCast {
        cfg.m as i32
    } else {
        1
    };
    let points = reachable(img, inner, stride);
    let centroid = mean(points.iter().map(|&p| (p, 1)));
    let area = f64::from(stride * stride) * points.len() as f64;
    let goal = round_pixel(centroid);
    let moved = if goal == inner {
        inner
    } else {
        move_toward(img, inner, goal)
    };
    FeatureEstimate {
        centroid,
        area,
        inner_point: finish(img, moved, cfg.n),
    }
}

/// Reference estimate for `b = 1`; `inner` must be a free pixel.
pub fn estimate(img: &EdgeImage, inner: PixelPos, cfg: &EstimatorConfig) -> FeatureEstimate {
    assert_eq!(cfg.b, 1);
    match cfg.technique {
        Technique::PixelFill | Technique::GridCast => filling(img, inner, cfg),
        _ => casting(img, inner, cfg),
    }
}
