use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EdgeImage, ImageError, PixelPos};

/// One explicit edge miscalculation: clear `width` contour pixels starting
/// at the edge pixel nearest to `location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub location: PixelPos,
    pub width: u32,
}

/// Explicit gaps followed by `random_gap_count` seeded random gaps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DegradationSpec {
    pub gaps: Vec<Gap>,
    pub rng_seed: u64,
    pub random_gap_count: usize,
    pub random_gap_width: u32,
    /// When set, random gaps only start at sites accepted by
    /// [`straight_gap_sites`] with this margin.
    pub straight_margin: Option<u32>,
}

impl DegradationSpec {
    pub fn explicit(gaps: Vec<Gap>) -> Self {
        Self {
            gaps,
            ..Self::default()
        }
    }

    pub fn random(count: usize, width: u32, seed: u64) -> Self {
        Self {
            rng_seed: seed,
            random_gap_count: count,
            random_gap_width: width,
            ..Self::default()
        }
    }
}

/// The exact pixels each gap of a spec clears, resolved against one image.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GapPlan {
    pub gaps: Vec<Vec<PixelPos>>,
}

impl GapPlan {
    pub fn cleared(&self) -> impl Iterator<Item = PixelPos> + '_ {
        self.gaps.iter().flatten().copied()
    }

    pub fn apply(&self, image: &EdgeImage) -> EdgeImage {
        let mut out = image.clone();
        for p in self.cleared() {
            out.clear(p);
        }
        out
    }
}

// Preference order for the first step of a contour walk.
const FIRST_STEPS: [(i32, i32); 8] = [
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, 0),
    (1, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
];

// Steps ordered counter-clockwise; a step's index is its heading.
const HEADINGS: [(i32, i32); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn heading(step: (i32, i32)) -> usize {
    HEADINGS.iter().position(|&h| h == step).expect("unit step")
}

/// Up to `len` edge pixels along an 8-connected walk starting at `start`,
/// preferring to keep the current heading, then the smallest turn.
fn contour_walk(image: &EdgeImage, start: PixelPos, len: usize) -> Vec<PixelPos> {
    let mut run = vec![start];
    let mut prev: Option<usize> = None;
    while run.len() < len {
        let cur = *run.last().unwrap();
        let order: Vec<(i32, i32)> = match prev {
            None => FIRST_STEPS.to_vec(),
            Some(h) => [0i32, 1, -1, 2, -2, 3, -3]
                .iter()
                .map(|t| HEADINGS[(h as i32 + t).rem_euclid(8) as usize])
                .collect(),
        };
        let next = order.into_iter().find(|&(dx, dy)| {
            let q = cur.offset(dx, dy);
            image.contains(q) && image.is_edge(q) && !run.contains(&q)
        });
        match next {
            Some(step) => {
                run.push(cur.offset(step.0, step.1));
                prev = Some(heading(step));
            }
            None => break,
        }
    }
    run
}

fn nearest_edge(image: &EdgeImage, location: PixelPos) -> Option<(PixelPos, i64)> {
    image
        .edge_pixels()
        .map(|p| {
            let dx = i64::from(p.x - location.x);
            let dy = i64::from(p.y - location.y);
            (p, dx * dx + dy * dy)
        })
        // row-major iteration keeps the first of equally near pixels
        .fold(None, |best: Option<(PixelPos, i64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
}

fn is_straight_run(image: &EdgeImage, run: &[PixelPos], margin: u32) -> bool {
    let axes: &[(i32, i32)] = if run.len() == 1 {
        &[(0, 1), (1, 0)]
    } else {
        &[]
    };
    let along = if run.len() >= 2 {
        let (a, b) = (run[0], run[1]);
        let step = (b.x - a.x, b.y - a.y);
        if step.0 != 0 && step.1 != 0 {
            return false;
        }
        let ok = run
            .windows(2)
            .all(|w| (w[1].x - w[0].x, w[1].y - w[0].y) == step);
        if !ok {
            return false;
        }
        vec![step]
    } else {
        axes.to_vec()
    };
    let m = margin as i32;
    along.into_iter().any(|(dx, dy)| {
        let (first, last) = (run[0], *run.last().unwrap());
        let ext_ok = (1..=m).all(|j| {
            image.contains(first.offset(-j * dx, -j * dy))
                && image.is_edge(first.offset(-j * dx, -j * dy))
                && image.contains(last.offset(j * dx, j * dy))
                && image.is_edge(last.offset(j * dx, j * dy))
        });
        if !ext_ok {
            return false;
        }
        let (px, py) = (dy, dx);
        let span = run.len() as i32 + 2 * m;
        (0..span).all(|i| {
            let s = first.offset((i - m) * dx, (i - m) * dy);
            (1..=m).all(|k| {
                let a = s.offset(k * px, k * py);
                let b = s.offset(-k * px, -k * py);
                image.contains(a) && !image.is_edge(a) && image.contains(b) && !image.is_edge(b)
            })
        })
    })
}

/// Edge pixels from which a width-`width` gap would be carved along an
/// axis-aligned straight wall.
///
/// The carved run plus `margin` pixels beyond each end must be collinear
/// edge pixels, and every pixel within `margin` of that extended segment
/// on either side must be a non-edge pixel.
pub fn straight_gap_sites(image: &EdgeImage, width: u32, margin: u32) -> Vec<PixelPos> {
    image
        .edge_pixels()
        .filter(|&p| {
            let run = contour_walk(image, p, width as usize);
            run.len() == width as usize && is_straight_run(image, &run, margin)
        })
        .collect()
}

/// Resolves every gap of `spec` to concrete pixels, in order, each gap
/// seeing the image with the previous gaps already carved.
pub fn plan_gaps(image: &EdgeImage, spec: &DegradationSpec) -> Result<GapPlan, ImageError> {
    let mut work = image.clone();
    let mut plan = GapPlan::default();
    for (index, gap) in spec.gaps.iter().enumerate() {
        if gap.width == 0 {
            return Err(ImageError::InvalidGap {
                index,
                reason: "gap width must be at least 1".into(),
            });
        }
        let Some((start, d2)) = nearest_edge(&work, gap.location) else {
            return Err(ImageError::InvalidGap {
                index,
                reason: "image has no edge pixels".into(),
            });
        };
        if d2 > i64::from(gap.width) * i64::from(gap.width) {
            return Err(ImageError::InvalidGap {
                index,
                reason: format!(
                    "location {:?} is not within {} px of an edge",
                    gap.location, gap.width
                ),
            });
        }
        let run = contour_walk(&work, start, gap.width as usize);
        if run.len() < gap.width as usize {
            return Err(ImageError::InvalidGap {
                index,
                reason: format!(
                    "contour near {:?} is shorter than {} px",
                    gap.location, gap.width
                ),
            });
        }
        for &p in &run {
            work.clear(p);
        }
        plan.gaps.push(run);
    }

    if spec.random_gap_count > 0 && spec.random_gap_width == 0 {
        return Err(ImageError::InvalidGap {
            index: spec.gaps.len(),
            reason: "random gap width must be at least 1".into(),
        });
    }
    let width = spec.random_gap_width as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    for i in 0..spec.random_gap_count {
        let index = spec.gaps.len() + i;
        let mut candidates: Vec<PixelPos> = match spec.straight_margin {
            Some(margin) => straight_gap_sites(&work, spec.random_gap_width, margin),
            None => work.edge_pixels().collect(),
        };
        let run = loop {
            if candidates.is_empty() {
                return Err(ImageError::InvalidGap {
                    index,
                    reason: "no admissible gap site left".into(),
                });
            }
            let k = rng.gen_range(0..candidates.len());
            let run = contour_walk(&work, candidates[k], width);
            if run.len() == width {
                break run;
            }
            candidates.swap_remove(k);
        };
        for &p in &run {
            work.clear(p);
        }
        plan.gaps.push(run);
    }
    Ok(plan)
}

/// Clears contiguous contour runs as described by `spec`. Only edge pixels
/// are ever cleared; the result is deterministic for a fixed `rng_seed`.
pub fn degrade(image: &EdgeImage, spec: &DegradationSpec) -> Result<EdgeImage, ImageError> {
    Ok(plan_gaps(image, spec)?.apply(image))
}
