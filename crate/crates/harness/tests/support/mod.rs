#![allow(dead_code)]

pub mod naive;

use castfeat::edge_image::{generate_scene, SceneSpec, Shape};
use castfeat::{EdgeImage, GroundTruth, PixelPos};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SIDE: i32 = 64;

fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    let lo = 4;
    let hi = SIDE - 5;
    match rng.gen_range(0..3) {
        0 => {
            let radius = rng.gen_range(3..=14);
            let center = PixelPos::new(
                rng.gen_range(lo + radius..=hi - radius),
                rng.gen_range(lo + radius..=hi - radius),
            );
            Shape::Disk {
                center,
                radius: radius as u32,
            }
        }
        1 => {
            let width = rng.gen_range(4..=40);
            let height = rng.gen_range(4..=40);
            let corner = PixelPos::new(
                rng.gen_range(lo..=hi - width),
                rng.gen_range(lo..=hi - height),
            );
            Shape::Rectangle {
                corner,
                width: width as u32,
                height: height as u32,
            }
        }
        _ => {
            let radius = rng.gen_range(2..=6);
            let mut end = || {
                PixelPos::new(
                    rng.gen_range(lo + radius..=hi - radius),
                    rng.gen_range(lo + radius..=hi - radius),
                )
            };
            let (a, b) = (end(), end());
            Shape::Capsule {
                a,
                b,
                radius: radius as u32,
            }
        }
    }
}

/// A 64x64 scene of one to three random shapes that has at least one
/// interior region.
pub fn random_scene(rng: &mut ChaCha8Rng) -> (SceneSpec, EdgeImage, Vec<GroundTruth>) {
    loop {
        let count = rng.gen_range(1..=3);
        let spec = SceneSpec {
            width: SIDE as usize,
            height: SIDE as usize,
            shapes: (0..count).map(|_| random_shape(rng)).collect(),
        };
        let (image, truths) = generate_scene(&spec).expect("random shapes respect the margin");
        if !truths.is_empty() {
            return (spec, image, truths);
        }
    }
}

/// A uniformly chosen pixel of a uniformly chosen region.
pub fn random_inner(rng: &mut ChaCha8Rng, truths: &[GroundTruth]) -> PixelPos {
    let region = &truths[rng.gen_range(0..truths.len())];
    *region
        .pixels
        .iter()
        .nth(rng.gen_range(0..region.pixels.len()))
        .unwrap()
}

pub fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}
