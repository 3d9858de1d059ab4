//! Overlay images of one estimator iteration.

use castfeat::estimators::Block;
use castfeat::{EdgeImage, PixelPos, Trace};

use crate::HarnessError;

pub type Rgb = [u8; 3];

pub mod palette {
    use super::Rgb;

    pub const BACKGROUND: Rgb = [255, 255, 255];
    pub const EDGE: Rgb = [0, 0, 0];
    pub const BLOCK: Rgb = [205, 222, 255];
    pub const MARKED: Rgb = [190, 238, 190];
    pub const GRID: Rgb = [255, 140, 0];
    pub const RAY: Rgb = [220, 40, 40];
    pub const HIT: Rgb = [170, 0, 170];
    pub const DISPLACEMENT: Rgb = [0, 90, 255];
    pub const INNER: Rgb = [0, 150, 0];
    pub const CENTROID: Rgb = [230, 180, 0];
}

/// A rendered frame plus the primitives that went into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
    /// Ray polylines in draw order.
    pub rays: Vec<Vec<PixelPos>>,
}

impl Overlay {
    fn new(image: &EdgeImage) -> Self {
        Self {
            width: image.width(),
            height: image.height(),
            pixels: vec![palette::BACKGROUND; image.width() * image.height()],
            rays: Vec::new(),
        }
    }

    fn put(&mut self, p: PixelPos, color: Rgb) {
        if p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height {
            self.pixels[p.y as usize * self.width + p.x as usize] = color;
        }
    }

    fn marker(&mut self, p: PixelPos, color: Rgb) {
        for d in -2..=2 {
            self.put(p.offset(d, 0), color);
            self.put(p.offset(0, d), color);
        }
    }

    fn block(&mut self, b: Block, m: i32) {
        for y in 0..m {
            for x in 0..m {
                self.put(PixelPos::new(b.col * m + x, b.row * m + y), palette::BLOCK);
            }
        }
    }

    pub fn get(&self, p: PixelPos) -> Rgb {
        self.pixels[p.y as usize * self.width + p.x as usize]
    }

    /// Binary PPM (P6) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().flatten());
        out
    }
}

/// Draws iteration `iteration` of `trace` over `image`. An empty trace may be
/// rendered at iteration 0 and shows the bare image.
pub fn build_overlay(
    image: &EdgeImage,
    trace: &Trace,
    iteration: usize,
) -> Result<Overlay, HarnessError> {
    let mut ov = Overlay::new(image);
    let draw_edges = |ov: &mut Overlay| {
        for p in image.edge_pixels() {
            ov.put(p, palette::EDGE);
        }
    };
    if trace.iterations.is_empty() && iteration == 0 {
        draw_edges(&mut ov);
        return Ok(ov);
    }
    let it = trace.iterations.get(iteration).ok_or_else(|| {
        HarnessError::Spec(format!(
            "iteration: {iteration} is out of range ({} recorded)",
            trace.iterations.len()
        ))
    })?;

    if let Some(m) = trace.block_size {
        for &b in &it.blocks {
            ov.block(b, m as i32);
        }
    }
    let grid = !it.grid_links.is_empty() || trace.technique == Some(castfeat::Technique::GridCast);
    if !grid {
        for &p in &it.marked {
            ov.put(p, palette::MARKED);
        }
    }
    draw_edges(&mut ov);
    if grid {
        for &(from, to) in &it.grid_links {
            let (dx, dy) = ((to.x - from.x).signum(), (to.y - from.y).signum());
            let mut cur = from;
            while cur != to {
                cur = cur.offset(dx, dy);
                ov.put(cur, palette::GRID);
            }
        }
        for &p in &it.marked {
            ov.put(p, palette::HIT);
        }
    }
    for ray in &it.rays {
        for &p in &ray.path {
            ov.put(p, palette::RAY);
        }
        ov.rays.push(ray.path.clone());
    }
    for ray in &it.rays {
        ov.put(ray.hit, palette::HIT);
    }
    for &p in &it.displacement {
        ov.put(p, palette::DISPLACEMENT);
    }
    ov.marker(it.inner_point, palette::INNER);
    ov.marker(it.centroid.round_to_pixel(), palette::CENTROID);
    Ok(ov)
}

pub fn render_overlay(
    image: &EdgeImage,
    trace: &Trace,
    iteration: usize,
) -> Result<Vec<u8>, HarnessError> {
    build_overlay(image, trace, iteration).map(|ov| ov.to_ppm())
}
