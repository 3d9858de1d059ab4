use std::collections::BTreeSet;

use castfeat::edge_image::{generate_scene, presets, SceneSpec, Shape};
use castfeat::estimators::{estimate_iter_n_ray, estimate_iter_ny_ray, recenter_inner_point};
use castfeat::traversal::cast_ray;
use castfeat::{compare, estimate, Direction, EstimatorConfig, PixelPos, Point, Technique};

fn cfg(technique: Technique, b: u32) -> EstimatorConfig {
    EstimatorConfig {
        b,
        ..EstimatorConfig::new(technique)
    }
}

const CENTER: PixelPos = PixelPos::new(50, 50);

#[test]
fn disk_truth_matches_a_direct_count() {
    let (img, truths) = generate_scene(&presets::disk()).unwrap();
    // pixels inside the disk whose 8-neighbours are all inside too
    let inside = |x: i32, y: i32| (x - 50).pow(2) + (y - 50).pow(2) <= 900;
    let mut expected = 0;
    for y in 0..101 {
        for x in 0..101 {
            let interior = (-1..=1).all(|dy| (-1..=1).all(|dx| inside(x + dx, y + dy)));
            expected += usize::from(interior);
        }
    }
    assert_eq!(truths.len(), 1);
    assert_eq!(truths[0].area, expected);
    assert_eq!(truths[0].area, 2585);
    assert_eq!(truths[0].centroid, Point::new(50.0, 50.0));
    assert_eq!(img.edge_count(), 236);
}

#[test]
fn axis_ray_on_the_disk() {
    let (img, _) = generate_scene(&presets::disk()).unwrap();
    // (79, 50) already borders (80, 51), which lies outside the disk
    for b in [1, 3, 5] {
        let hit = cast_ray(&img, CENTER, Direction::new(0.0), b).unwrap();
        assert_eq!(hit.hit, PixelPos::new(78, 50));
        assert_eq!(hit.length, 28.0);
    }
}

#[test]
fn single_cast_on_the_disk() {
    let (img, truths) = generate_scene(&presets::disk()).unwrap();
    let (est, trace) = estimate(
        &img,
        CENTER,
        &EstimatorConfig {
            n: 32,
            ..cfg(Technique::NRay, 1)
        },
    )
    .unwrap();
    assert_eq!(est.centroid, Point::new(50.0, 50.0));
    assert!(
        (est.area - 899.744_212_902_094_9).abs() < 1e-9,
        "{}",
        est.area
    );
    assert_eq!(est.inner_point, CENTER);
    assert_eq!(trace.iterations.len(), 1);
    assert_eq!(trace.iterations[0].rays.len(), 32);
    assert_eq!(compare(&est, &truths[0]).unwrap().centroid_error, 0.0);
}

#[test]
fn iterative_cast_converges_everywhere_on_the_disk() {
    let (img, truths) = generate_scene(&presets::disk()).unwrap();
    let centre = Point::new(50.0, 50.0);
    for &start in truths[0].pixels.iter().step_by(5) {
        let (est, trace) = estimate_iter_n_ray(&img, start, &cfg(Technique::IterNRay, 1)).unwrap();
        // the mean hit lands roughly halfway to the centre, so the walk
        // from the rim takes up to seven casts
        assert!(
            trace.converged && trace.iterations.len() <= 7,
            "{start:?}: {}",
            trace.iterations.len()
        );
        let dist: Vec<f64> = trace
            .trajectory()
            .iter()
            .map(|p| p.to_point().distance(centre))
            .collect();
        assert!(dist.windows(2).all(|w| w[1] <= w[0]), "{start:?}: {dist:?}");
        assert!(
            est.centroid.distance(centre) < 1.0,
            "{start:?}: {:?}",
            est.centroid
        );
    }
    let (_, trace) =
        estimate_iter_n_ray(&img, PixelPos::new(35, 60), &cfg(Technique::IterNRay, 1)).unwrap();
    let path: Vec<_> = trace
        .iterations
        .iter()
        .map(|it| (it.inner_point.x, it.inner_point.y))
        .collect();
    assert_eq!(
        path,
        vec![(35, 60), (42, 55), (46, 52), (48, 51), (49, 50), (50, 50)]
    );
}

#[test]
fn iter_n_ray_on_the_rectangle() {
    let (img, _) = generate_scene(&presets::rectangle()).unwrap();
    let (est, trace) = estimate(&img, PixelPos::new(20, 18), &cfg(Technique::IterNRay, 1)).unwrap();
    assert_eq!(est.centroid, Point::new(24.375, 20.0));
    assert_eq!(est.inner_point, PixelPos::new(24, 20));
    assert_eq!(trace.iterations.len(), 5);
    assert_eq!(trace.work(), 2314);
}

#[test]
fn fan_out_counts() {
    let (img, _) = generate_scene(&presets::disk()).unwrap();
    let c = EstimatorConfig {
        n: 16,
        y: 2,
        max_iterations: 1,
        ..cfg(Technique::IterNyRay, 1)
    };
    let (_, trace) = estimate_iter_ny_ray(&img, CENTER, &c).unwrap();
    let rays = &trace.iterations[0].rays;
    assert!(rays.len() <= 16 + 16 * 16);
    assert_eq!(rays.len(), 272);
    assert_eq!(
        rays.iter()
            .filter(|r| r.level == 2)
            .map(|r| r.weight)
            .sum::<u64>(),
        256
    );
}

#[test]
fn depth_one_recast_is_the_iterative_cast() {
    let (img, _) = generate_scene(&presets::hand_v1()).unwrap();
    for start in [presets::HAND_V1_FINGER_POINT, PixelPos::new(80, 110)] {
        for b in [1, 3] {
            let ny = EstimatorConfig {
                y: 1,
                n: 16,
                ..cfg(Technique::IterNyRay, b)
            };
            let iter = EstimatorConfig {
                technique: Technique::IterNRay,
                ..ny
            };
            assert_eq!(
                estimate(&img, start, &ny).unwrap().0,
                estimate(&img, start, &iter).unwrap().0
            );
        }
    }
}

#[test]
fn hand_from_the_finger() {
    let (img, truths) = generate_scene(&presets::hand_v1()).unwrap();
    assert_eq!(truths.len(), 1);
    assert_eq!(truths[0].area, 5641);
    let finger = presets::HAND_V1_FINGER_POINT;
    let run = |t| {
        let (est, trace) = estimate(&img, finger, &EstimatorConfig { n: 16, ..cfg(t, 1) }).unwrap();
        (
            compare(&est, &truths[0]).unwrap().centroid_error,
            est,
            trace,
        )
    };
    let (err, est, _) = run(Technique::PixelFill);
    assert_eq!(err, 0.0);
    assert_eq!(est.area, 5641.0);
    let (err, est, _) = run(Technique::GridCast);
    assert_eq!(est.area, 5760.0);
    assert!((err - 1.517_847_528_234_151_5).abs() < 1e-9);
    let (_, est, trace) = run(Technique::IterNyRaster);
    assert_eq!(est.area, 7616.0);
    assert_eq!(trace.iterations.len(), 5);
    let (_, est, _) = run(Technique::NRay);
    assert_eq!(est.centroid, Point::new(76.375, 36.4375));
}

#[test]
fn raster_selection_only_grows() {
    let (img, _) = generate_scene(&presets::hand_v1()).unwrap();
    let c = EstimatorConfig {
        n: 16,
        ..cfg(Technique::IterNyRaster, 3)
    };
    let (est, trace) = estimate(&img, presets::HAND_V1_FINGER_POINT, &c).unwrap();
    let sets: Vec<BTreeSet<_>> = trace
        .iterations
        .iter()
        .map(|it| it.blocks.iter().copied().collect())
        .collect();
    assert!(sets.windows(2).all(|w| w[0].is_subset(&w[1])));
    assert_eq!(est.area, 64.0 * sets.last().unwrap().len() as f64);
    assert_eq!(trace.block_size, Some(8));
}

#[test]
fn raster_on_the_disk() {
    let (img, _) = generate_scene(&presets::disk()).unwrap();
    let (est, trace) = estimate(&img, CENTER, &cfg(Technique::IterNyRaster, 1)).unwrap();
    assert_eq!(est.area, 3328.0);
    assert_eq!(
        est.centroid,
        Point::new(49.192_307_692_307_69, 49.192_307_692_307_69)
    );
    assert_eq!(trace.iterations.len(), 2);
}

#[test]
fn unit_lattice_grid_is_pixel_fill() {
    for scene in [presets::disk(), presets::rectangle(), presets::hand_v1()] {
        let (img, truths) = generate_scene(&scene).unwrap();
        let inner = *truths[0].pixels.iter().next().unwrap();
        for b in [1, 3, 5] {
            let grid = EstimatorConfig {
                m: 1,
                ..cfg(Technique::GridCast, b)
            };
            let fill = EstimatorConfig {
                technique: Technique::PixelFill,
                ..grid
            };
            let (g, gt) = estimate(&img, inner, &grid).unwrap();
            let (f, ft) = estimate(&img, inner, &fill).unwrap();
            assert_eq!(g, f);
            let set = |t: &castfeat::Trace| {
                t.iterations[0]
                    .marked
                    .iter()
                    .copied()
                    .collect::<BTreeSet<_>>()
            };
            assert_eq!(set(&gt), set(&ft));
        }
    }
}

#[test]
fn coarse_grid_on_the_disk() {
    let (img, truths) = generate_scene(&presets::disk()).unwrap();
    let (est, trace) = estimate(&img, CENTER, &cfg(Technique::GridCast, 1)).unwrap();
    assert_eq!(est.area, 2368.0);
    assert_eq!(trace.iterations[0].marked.len(), 37);
    assert_eq!(est.centroid, Point::new(50.0, 50.0));
    assert_eq!(trace.work(), 1308);
    let off_centre = PixelPos::new(47, 52);
    let (est, _) = estimate(&img, off_centre, &cfg(Technique::GridCast, 1)).unwrap();
    let error = compare(&est, &truths[0]).unwrap().centroid_error;
    assert!(error > 0.0 && error < 8.0, "{error}");
}

#[test]
fn pixel_fill_with_barriers_on_the_disk() {
    let (img, _) = generate_scene(&presets::disk()).unwrap();
    let (est, trace) = estimate(&img, CENTER, &cfg(Technique::PixelFill, 3)).unwrap();
    assert_eq!(est.area, 2517.0);
    assert_eq!(trace.work(), 10444);
    let (_, trace) = estimate(&img, CENTER, &cfg(Technique::PixelFill, 1)).unwrap();
    assert_eq!(trace.work(), 3652);
}

#[test]
fn recentering() {
    let (img, _) = generate_scene(&presets::disk()).unwrap();
    let c = cfg(Technique::NRay, 1);
    assert_eq!(
        recenter_inner_point(&img, CENTER, CENTER.to_point(), &c).unwrap(),
        CENTER
    );
    assert_eq!(
        recenter_inner_point(&img, PixelPos::new(30, 50), CENTER.to_point(), &c).unwrap(),
        CENTER
    );
    assert!(recenter_inner_point(&img, PixelPos::new(80, 50), CENTER.to_point(), &c).is_err());
}

#[test]
fn two_objects_do_not_mix() {
    let spec = SceneSpec {
        width: 60,
        height: 30,
        shapes: vec![
            Shape::Disk {
                center: PixelPos::new(14, 14),
                radius: 10,
            },
            Shape::Rectangle {
                corner: PixelPos::new(32, 5),
                width: 20,
                height: 18,
            },
        ],
    };
    let (img, truths) = generate_scene(&spec).unwrap();
    assert_eq!(truths.len(), 2);
    for t in Technique::ALL {
        let (est, _) = estimate(&img, PixelPos::new(14, 14), &cfg(t, 3)).unwrap();
        assert!(est.centroid.x < 30.0, "{t}: {:?}", est.centroid);
        assert!(
            truths[0].pixels.contains(&est.inner_point),
            "{t}: {:?}",
            est.inner_point
        );
    }
}

mod contract_examples {
    use super::*;
    use castfeat::edge_image::{degrade, plan_gaps, straight_gap_sites, DegradationSpec, Gap};
    use castfeat::traversal::blocked;
    use castfeat::EdgeImage;

    /// Cuts one straight-wall gap of `width` into the disk and returns the
    /// image, the cleared run and the interior neighbour of `run[k]`.
    fn disk_gap(width: u32, margin: u32, k: usize) -> (EdgeImage, Vec<PixelPos>, PixelPos) {
        let (img, truths) = generate_scene(&presets::disk()).unwrap();
        let spec = DegradationSpec {
            straight_margin: Some(margin),
            ..DegradationSpec::random(1, width, 3)
        };
        assert!(!straight_gap_sites(&img, width, margin).is_empty());
        let run = plan_gaps(&img, &spec).unwrap().gaps.remove(0);
        let target = run[k];
        let horizontal = run.iter().all(|p| p.y == run[0].y);
        let (dx, dy) = if horizontal { (0, 1) } else { (1, 0) };
        let source = [target.offset(dx, dy), target.offset(-dx, -dy)]
            .into_iter()
            .find(|p| truths[0].pixels.contains(p))
            .unwrap();
        (degrade(&img, &spec).unwrap(), run, source)
    }

    #[test]
    fn two_pixel_gap_needs_a_size_three_barrier() {
        let (img, run, source) = disk_gap(2, 1, 0);
        assert!(!blocked(&img, source, run[0], 1).unwrap());
        assert!(blocked(&img, source, run[0], 3).unwrap());
    }

    #[test]
    fn four_pixel_gap_needs_a_size_five_barrier() {
        // a 4 px straight run with 2 px of clearance exists on the rectangle
        // but not on the disk, whose straight runs are shorter
        let (img, _) = generate_scene(&presets::disk()).unwrap();
        assert!(straight_gap_sites(&img, 4, 2).is_empty());
        let (img, _) = generate_scene(&presets::rectangle()).unwrap();
        let gap = Gap {
            location: PixelPos::new(20, 10),
            width: 4,
        };
        let run = plan_gaps(&img, &DegradationSpec::explicit(vec![gap]))
            .unwrap()
            .gaps
            .remove(0);
        let img = degrade(&img, &DegradationSpec::explicit(vec![gap])).unwrap();
        let target = run[1];
        let source = target.offset(0, 1);
        assert!(run.iter().all(|p| p.y == 10));
        assert!(!blocked(&img, source, target, 3).unwrap());
        assert!(blocked(&img, source, target, 5).unwrap());
    }

    #[test]
    fn ray_casting_edge_cases() {
        let blank = EdgeImage::blank(101, 101).unwrap();
        let hit = cast_ray(&blank, CENTER, Direction::new(0.0), 1).unwrap();
        assert_eq!((hit.hit, hit.length), (PixelPos::new(100, 50), 50.0));
        let wall = EdgeImage::from_fn(20, 20, |p| p.x == 11).unwrap();
        for b in [1, 3, 5] {
            let hit = cast_ray(&wall, PixelPos::new(10, 5), Direction::new(0.0), b).unwrap();
            assert_eq!((hit.hit, hit.length), (PixelPos::new(10, 5), 0.0));
        }
    }

    #[test]
    fn off_centre_cast_moves_toward_the_centre() {
        let (img, _) = generate_scene(&presets::disk()).unwrap();
        let inner = PixelPos::new(30, 50);
        let (est, _) = estimate(&img, inner, &cfg(Technique::NRay, 1)).unwrap();
        let centre = CENTER.to_point();
        assert!(est.centroid.distance(centre) < inner.to_point().distance(centre));
        assert_eq!(est.centroid, Point::new(40.0625, 50.0));
    }

    #[test]
    fn finger_cast_sees_a_fragment() {
        let (img, truths) = generate_scene(&presets::hand_v1()).unwrap();
        let (est, _) = estimate(
            &img,
            presets::HAND_V1_FINGER_POINT,
            &cfg(Technique::NRay, 1),
        )
        .unwrap();
        let ratio = est.area / truths[0].area as f64;
        assert!(ratio < 0.5);
        assert!((ratio - 0.066_346_260_894_133_17).abs() < 1e-12, "{ratio}");
    }

    #[test]
    fn iterating_moves_into_wider_areas() {
        let (img, _) = generate_scene(&presets::hand_v1()).unwrap();
        let c = EstimatorConfig {
            n: 32,
            ..cfg(Technique::IterNRay, 1)
        };
        let (_, trace) = estimate(&img, presets::HAND_V1_FINGER_POINT, &c).unwrap();
        let first = trace.iterations.first().unwrap().area;
        let last = trace.iterations.last().unwrap().area;
        assert!(last >= first, "{first} -> {last}");
    }

    #[test]
    fn one_iteration_is_a_single_cast() {
        let (img, _) = generate_scene(&presets::hand_v1()).unwrap();
        for inner in [presets::HAND_V1_FINGER_POINT, PixelPos::new(70, 120)] {
            for b in [1, 3] {
                let single = cfg(Technique::NRay, b);
                let iter = EstimatorConfig {
                    max_iterations: 1,
                    ..cfg(Technique::IterNRay, b)
                };
                assert_eq!(
                    estimate(&img, inner, &single).unwrap().0,
                    estimate(&img, inner, &iter).unwrap().0
                );
            }
        }
    }

    #[test]
    fn recasting_beats_the_plain_iteration_on_the_hand() {
        let (img, truths) = generate_scene(&presets::hand_v1()).unwrap();
        let error = |t| {
            let c = EstimatorConfig {
                n: 16,
                y: 2,
                max_iterations: 2,
                ..cfg(t, 1)
            };
            let (est, _) = estimate(&img, presets::HAND_V1_FINGER_POINT, &c).unwrap();
            compare(&est, &truths[0]).unwrap().centroid_error
        };
        assert!(error(Technique::IterNyRay) < error(Technique::IterNRay));
    }

    #[test]
    fn raster_area_stays_within_a_block_band() {
        let (img, truths) = generate_scene(&presets::disk()).unwrap();
        let perimeter = img.edge_count() as f64;
        let (est, _) = estimate(
            &img,
            CENTER,
            &EstimatorConfig {
                n: 16,
                ..cfg(Technique::IterNyRaster, 1)
            },
        )
        .unwrap();
        let oracle = truths[0].area as f64;
        assert!((est.area - oracle).abs() <= perimeter * 8.0);
    }

    #[test]
    fn fill_from_anywhere_is_the_oracle() {
        let (img, truths) = generate_scene(&presets::disk()).unwrap();
        for &inner in truths[0].pixels.iter().step_by(97) {
            let (est, _) = estimate(&img, inner, &cfg(Technique::PixelFill, 1)).unwrap();
            let report = compare(&est, &truths[0]).unwrap();
            assert_eq!((report.centroid_error, report.area_ratio), (0.0, 1.0));
        }
    }

    #[test]
    fn single_gap_escape_and_its_barrier_fix() {
        let (img, truths) = generate_scene(&presets::disk()).unwrap();
        let gap = Gap {
            location: PixelPos::new(79, 45),
            width: 1,
        };
        let gapped = degrade(&img, &DegradationSpec::explicit(vec![gap])).unwrap();
        let area = |b| {
            estimate(&gapped, CENTER, &cfg(Technique::PixelFill, b))
                .unwrap()
                .0
                .area
        };
        assert!(area(1) > 1.5 * truths[0].area as f64);
        // same marked area as on the ungapped disk
        assert_eq!(area(3), 2517.0);
    }

    #[test]
    fn grid_phase_follows_the_inner_point() {
        let (img, _) = generate_scene(&presets::disk()).unwrap();
        let perimeter = img.edge_count() as f64;
        let (a, _) = estimate(&img, CENTER, &cfg(Technique::GridCast, 1)).unwrap();
        let (b, _) = estimate(&img, PixelPos::new(42, 50), &cfg(Technique::GridCast, 1)).unwrap();
        assert!((a.centroid.x - b.centroid.x).abs() <= 8.0);
        assert!((a.centroid.y - b.centroid.y).abs() <= 8.0);
        assert!((a.area - b.area).abs() <= perimeter * 8.0);
    }

    #[test]
    fn finger_point_recentres_toward_the_palm() {
        let (img, _) = generate_scene(&presets::hand_v1()).unwrap();
        let palm = Point::new(80.0, 110.0);
        let start = presets::HAND_V1_FINGER_POINT;
        let out = recenter_inner_point(&img, start, palm, &cfg(Technique::NRay, 3)).unwrap();
        assert!(out.to_point().distance(palm) < start.to_point().distance(palm));
        assert!(!img.is_edge(out));
    }
}
