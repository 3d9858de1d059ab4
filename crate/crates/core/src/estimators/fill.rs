//! Filling estimators: breadth-first pixel fill and the sparse `m`-lattice
//! grid cast.

use std::collections::{HashSet, VecDeque};

use crate::edge_image::{mean_from_sums, EdgeImage, PixelPos, Point};
use crate::traversal::Walker;

use super::recenter::{displace, relocate};
use super::{
    check_inner, EstimateError, EstimatorConfig, FeatureEstimate, IterationTrace, Technique, Trace,
};

fn mean(points: &[PixelPos]) -> Point {
    let (sx, sy) = points.iter().fold((0i128, 0i128), |(sx, sy), p| {
        (sx + i128::from(p.x), sy + i128::from(p.y))
    });
    mean_from_sums(sx, sy, points.len() as i128)
}

fn finish(
    mut walker: Walker<'_>,
    mut it: IterationTrace,
    cfg: &EstimatorConfig,
    technique: Technique,
) -> (FeatureEstimate, Trace) {
    let start = it.inner_point;
    it.displaced_to = displace(&mut walker, start, it.centroid, &mut it.displacement);
    it.probes = walker.probes();
    let relocation = relocate(&mut walker, it.displaced_to, cfg.n);
    let estimate = FeatureEstimate {
        centroid: it.centroid,
        area: it.area,
        inner_point: relocation.result,
    };
    let trace = Trace {
        technique: Some(technique),
        iterations: vec![it],
        relocation: Some(relocation),
        block_size: None,
        converged: true,
    };
    (estimate, trace)
}

/// Breadth-first 4-neighbour fill from the inner point. A neighbour is
/// marked when the step into it passes the barrier check; the marked pixels
/// give the centroid and their count the area.
pub fn estimate_pixel_fill(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    cfg.validate()?;
    check_inner(image, inner)?;
    let mut walker = Walker::new(image, cfg.barrier()?);
    let w = image.width();
    let idx = |p: PixelPos| p.y as usize * w + p.x as usize;
    let mut marked = vec![false; w * image.height()];
    let mut it = IterationTrace::new(inner);

    marked[idx(inner)] = true;
    it.marked.push(inner);
    let mut queue = VecDeque::from([inner]);
    while let Some(s) = queue.pop_front() {
        for t in s.neighbors4() {
            if image.contains(t) && marked[idx(t)] {
                continue;
            }
            if walker.step_allowed(s, t) {
                marked[idx(t)] = true;
                it.marked.push(t);
                queue.push_back(t);
            }
        }
    }
    it.centroid = mean(&it.marked);
    it.area = it.marked.len() as f64;
    Ok(finish(walker, it, cfg, Technique::PixelFill))
}

/// Fill over the lattice of pixels whose offsets from the inner point are
/// multiples of `m`. Moving to an adjacent lattice point walks the `m` unit
/// steps in between and is abandoned at the first blocked step.
pub fn estimate_grid_cast(
    image: &EdgeImage,
    inner: PixelPos,
    cfg: &EstimatorConfig,
) -> Result<(FeatureEstimate, Trace), EstimateError> {
    cfg.validate()?;
    check_inner(image, inner)?;
    let mut walker = Walker::new(image, cfg.barrier()?);
    let m = cfg.m as i32;
    let mut it = IterationTrace::new(inner);
    let mut reached: HashSet<PixelPos> = HashSet::from([inner]);
    it.marked.push(inner);
    let mut queue = VecDeque::from([inner]);

    while let Some(from) = queue.pop_front() {
        for unit in from.neighbors4() {
            let (dx, dy) = (unit.x - from.x, unit.y - from.y);
            let to = from.offset(dx * m, dy * m);
            if reached.contains(&to) {
                continue;
            }
            let mut cur = from;
            let clear = (0..m).all(|_| {
                let next = cur.offset(dx, dy);
                let ok = walker.step_allowed(cur, next);
                cur = next;
                ok
            });
            if clear {
                reached.insert(to);
                it.marked.push(to);
                it.grid_links.push((from, to));
                queue.push_back(to);
            }
        }
    }
    it.centroid = mean(&it.marked);
    it.area = f64::from(cfg.m) * f64::from(cfg.m) * it.marked.len() as f64;
    Ok(finish(walker, it, cfg, Technique::GridCast))
}
