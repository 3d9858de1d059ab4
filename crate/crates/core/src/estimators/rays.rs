//! Ray-casting estimators: single cast, iterative cast, iterative recast to
//! depth `y`, and the rasterized variant that scores `m x m` blocks.

use std::collections::{BTreeSet, HashMap};

use crate::edge_image::{mean_from_sums, EdgeImage, PixelPos, Point};
use crate::traversal::Walker;

use super::recenter::{cast_star, displace, relocate};
use super::{
    check_inner, Block, EstimateError, EstimatorConfig, FeatureEstimate, IterationTrace, RayTrace,
    Technique, Trace,
};

/// Casts from `origin`, then recasts from every hit of the previous level
/// until `depth` levels exist. Repeated hit positions are recast once and
/// carry their multiplicity as the ray weight.
fn cast_fan(
    walker: &mut Walker<'_>,
    origin: PixelPos,
    n: u32,
    depth: u32,
    out: &mut Vec<RayTrace>,
) {
    let mut origins: Vec<(PixelPos, u64)> = vec![(origin, 1)];
    for level in 1..=depth {
        let first = out.len();
        for (o, weight) in merge_weights(&origins) {
            cast_star(walker, o, n, level, weight, out);
        }
        origins = out[first..].iter().map(|r| (r.hit, r.weight)).collect();
    }
}

/// Sums weights of equal positions, keeping first-occurrence order.
fn merge_weights(items: &[(PixelPos, u64)]) -> Vec<(PixelPos, u64)> {
    let mut index: HashMap<PixelPos, usize> = HashMap::new();
    let mut merged: Vec<(PixelPos, u64)> = Vec::new();
    for &(p, w) in items {
        match index.get(&p) {
            Some(&i) => merged[i].1 += w,
            None => {
                index.insert(p, merged.len());
                merged.push((p, w));
            }
        }
    }
    merged
}

fn block_of(p: PixelPos, m: i32) -> Block {
    Block {
        col: p.x.div_euclid(m),
        row: p.y.div_euclid(m),
    }
}

/// Mean of block centres, each centre taken over the block's in-image part.
fn block_centroid(blocks: &BTreeSet<Block>, m: i32, image: &EdgeImage) -> Point {
    let (w, h) = (image.width() as i64, image.height() as i64);
    let (mut sx, mut sy) = (0i128, 0i128);
    for b in blocks {
        let x0 = i64::from(b.col) * i64::from(m);
        let y0 = i64::from(b.row) * i64::from(m);
        sx += i128::from(x0 + (x0 + i64::from(m)).min(w) - 1);
        sy += i128::from(y0 + (y0 + i64::from(m)).min(h) - 1);
    }
    mean_from_sums(sx, sy, 2 * blocks.len() as i128)
}

fn run(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
    technique: Technique,
    depth: u32,
    max_iterations: u32,
    raster: bool,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    cfg.validate()?;
    check_inner(image, inner)?;
    let mut walker = Walker::new(image, cfg.barrier()?);
    let m = cfg.m as i32;
    let mut trace = Trace {
        technique: Some(technique),
        block_size: raster.then_some(cfg.m),
        ..Trace::default()
    };
    let mut selected: BTreeSet<Block> = BTreeSet::new();
    let mut point = inner;
    let mut previous: Option<Point> = None;

    for _ in 0..max_iterations {
        let before = walker.probes();
        let mut it = IterationTrace::new(point);
        cast_fan(&mut walker, point, cfg.n, depth, &mut it.rays);

        if raster {
            for r in &it.rays {
                selected.extend(r.path.iter().map(|&p| block_of(p, m)));
            }
            it.centroid = block_centroid(&selected, m, image);
            it.area = f64::from(cfg.m) * f64::from(cfg.m) * selected.len() as f64;
            it.blocks = selected.iter().copied().collect();
        } else {
            let last = it.rays.iter().filter(|r| r.level == depth);
            let (mut sx, mut sy, mut total, mut area) = (0i128, 0i128, 0i128, 0.0);
            for r in last {
                let w = i128::from(r.weight);
                sx += w * i128::from(r.hit.x);
                sy += w * i128::from(r.hit.y);
                total += w;
                area += r.weight as f64 * r.length;
            }
            it.centroid = mean_from_sums(sx, sy, total);
            it.area = area;
        }

        it.displaced_to = displace(&mut walker, point, it.centroid, &mut it.displacement);
        let centroid_shift = it
            .centroid
            .distance(previous.unwrap_or_else(|| point.to_point()));
        let point_shift = point.distance(it.displaced_to);
        previous = Some(it.centroid);
        point = it.displaced_to;
        it.probes = walker.probes() - before;
        trace.iterations.push(it);
        if centroid_shift < cfg.epsilon && point_shift < cfg.epsilon {
            trace.converged = true;
            break;
        }
    }

    let last = trace.iterations.last().expect("at least one iteration");
    let (centroid, area) = (last.centroid, last.area);
    let relocation = relocate(&mut walker, point, cfg.n);
    let estimate = FeatureEstimate {
        centroid,
        area,
        inner_point: relocation.result,
    };
    trace.relocation = Some(relocation);
    Ok((estimate, trace))
}

/// Single cast of `n` rays: centroid is the mean hit, area the sum of ray
/// lengths.
pub fn estimate_n_ray(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    run(image, inner, cfg, Technique::NRay, 1, 1, false)
}

/// Repeats the `n`-ray cast from the displaced inner point until both the
/// centroid and the inner point settle.
pub fn estimate_iter_n_ray(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    run(
        image,
        inner,
        cfg,
        Technique::IterNRay,
        1,
        cfg.max_iterations,
        false,
    )
}

/// Iterative cast where every level-`k` hit recasts `n` rays, `y` levels
/// deep; estimates use the `n^y` rays of the deepest level.
pub fn estimate_iter_ny_ray(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    run(
        image,
        inner,
        cfg,
        Technique::IterNyRay,
        cfg.y,
        cfg.max_iterations,
        false,
    )
}

/// Iterative `n^y` cast that selects every `m x m` block crossed by any ray
/// and keeps the selection across iterations.
pub fn estimate_iter_ny_raster(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    run(
        image,
        inner,
        cfg,
        Technique::IterNyRaster,
        cfg.y,
        cfg.max_iterations,
        true,
    )
}
