//! Experiment specifications and the sweep runner.

use std::path::PathBuf;
use std::time::Instant;

use castfeat::edge_image::{degrade, generate_scene, presets, DegradationSpec, Gap, SceneSpec};
use castfeat::{
    compare, estimate, flood_region, EdgeImage, EstimateError, EstimatorConfig, GroundTruth,
    PixelPos, Technique,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::results::ResultRow;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneSource {
    Preset(String),
    Inline(SceneSpec),
    /// Path to a scene JSON document; resolved by [`ExperimentSpec::resolve_scene`].
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomGapGrid {
    pub widths: Vec<u32>,
    pub counts: Vec<usize>,
    pub seeds: Vec<u64>,
    pub straight_margin: Option<u32>,
}

impl Default for RandomGapGrid {
    fn default() -> Self {
        Self {
            widths: vec![1],
            counts: vec![1],
            seeds: vec![0],
            straight_margin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DegradationGrid {
    /// Run on the undegraded image.
    pub clean: bool,
    /// Explicit gaps, applied together as one extra case.
    pub explicit: Vec<Gap>,
    /// Seeded random gaps, one case per width x count x seed.
    pub random: Option<RandomGapGrid>,
}

impl Default for DegradationGrid {
    fn default() -> Self {
        Self {
            clean: true,
            explicit: Vec::new(),
            random: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorGrid {
    pub techniques: Vec<Technique>,
    pub n: Vec<u32>,
    pub y: Vec<u32>,
    pub m: Vec<u32>,
    pub b: Vec<u32>,
    pub max_iterations: u32,
    pub epsilon: f64,
}

impl Default for EstimatorGrid {
    fn default() -> Self {
        let d = EstimatorConfig::default();
        Self {
            techniques: vec![Technique::PixelFill],
            n: vec![d.n],
            y: vec![d.y],
            m: vec![d.m],
            b: vec![d.b],
            max_iterations: d.max_iterations,
            epsilon: d.epsilon,
        }
    }
}

impl EstimatorGrid {
    /// Configurations in technique-major order, then n, y, m, b.
    pub fn configs(&self) -> Vec<EstimatorConfig> {
        let mut out = Vec::new();
        for &technique in &self.techniques {
            for &n in &self.n {
                for &y in &self.y {
                    for &m in &self.m {
                        for &b in &self.b {
                            out.push(EstimatorConfig {
                                technique,
                                n,
                                y,
                                m,
                                b,
                                max_iterations: self.max_iterations,
                                epsilon: self.epsilon,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerPlacement {
    /// The target region's pixel nearest to its centroid.
    Center,
    /// `count` pixels drawn uniformly from the target region.
    Random {
        seed: u64,
        count: usize,
    },
    Points(Vec<PixelPos>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scene: SceneSource,
    /// Index of the ground-truth region used for inner-point placement.
    #[serde(default)]
    pub target: usize,
    #[serde(default)]
    pub degradation: DegradationGrid,
    #[serde(default)]
    pub estimators: EstimatorGrid,
    #[serde(default = "default_inner")]
    pub inner: InnerPlacement,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
}

fn default_inner() -> InnerPlacement {
    InnerPlacement::Center
}

fn default_repetitions() -> u32 {
    1
}

/// One prepared edge image of the degradation grid.
#[derive(Debug, Clone)]
pub struct DegradeCase {
    pub label: &'static str,
    pub gap_width: Option<u32>,
    pub gap_count: Option<usize>,
    pub gap_seed: Option<u64>,
    pub image: EdgeImage,
}

/// Everything a sweep needs, validated and materialized.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scene_name: String,
    pub clean: EdgeImage,
    pub truths: Vec<GroundTruth>,
    pub cases: Vec<DegradeCase>,
    pub inner_points: Vec<PixelPos>,
    pub configs: Vec<EstimatorConfig>,
    pub repetitions: u32,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Spec(format!("experiment spec: {e}")))
    }

    /// Replaces a `file` scene source with its parsed contents, resolving
    /// relative paths against `base`.
    pub fn resolve_scene(&mut self, base: &std::path::Path) -> Result<(), HarnessError> {
        if let SceneSource::File(path) = &self.scene {
            let full = if path.is_relative() {
                base.join(path)
            } else {
                path.clone()
            };
            let text = std::fs::read_to_string(&full).map_err(|e| HarnessError::io(&full, e))?;
            let spec: SceneSpec = serde_json::from_str(&text)
                .map_err(|e| HarnessError::Spec(format!("scene file {}: {e}", full.display())))?;
            self.scene = SceneSource::Inline(spec);
        }
        Ok(())
    }

    /// Overrides every seed of the spec.
    pub fn override_seed(&mut self, seed: u64) {
        if let Some(random) = &mut self.degradation.random {
            random.seeds = vec![seed];
        }
        if let InnerPlacement::Random { seed: s, .. } = &mut self.inner {
            *s = seed;
        }
    }

    pub fn prepare(&self) -> Result<Prepared, HarnessError> {
        let (scene_name, scene) = match &self.scene {
            SceneSource::Preset(name) => (
                name.clone(),
                presets::by_name(name).ok_or_else(|| {
                    HarnessError::Spec(format!(
                        "scene.preset: unknown preset `{name}` (expected one of {})",
                        presets::NAMES.join(", ")
                    ))
                })?,
            ),
            SceneSource::Inline(spec) => ("inline".to_string(), spec.clone()),
            SceneSource::File(path) => {
                return Err(HarnessError::Spec(format!(
                    "scene.file {} was not resolved",
                    path.display()
                )))
            }
        };
        let (clean, truths) =
            generate_scene(&scene).map_err(|e| HarnessError::Spec(format!("scene: {e}")))?;
        if self.repetitions == 0 {
            return Err(HarnessError::Spec("repetitions: must be at least 1".into()));
        }

        let configs = self.estimators.configs();
        if configs.is_empty() {
            return Err(HarnessError::Spec("estimators: the grid is empty".into()));
        }
        for cfg in &configs {
            cfg.validate()
                .map_err(|e| HarnessError::Spec(format!("estimators: {e}")))?;
        }

        let cases = self.degradation_cases(&clean)?;
        let inner_points = self.inner_points(&truths)?;
        Ok(Prepared {
            scene_name,
            clean,
            truths,
            cases,
            inner_points,
            configs,
            repetitions: self.repetitions,
        })
    }

    fn degradation_cases(&self, clean: &EdgeImage) -> Result<Vec<DegradeCase>, HarnessError> {
        let grid = &self.degradation;
        let mut cases = Vec::new();
        if grid.clean {
            cases.push(DegradeCase {
                label: "clean",
                gap_width: None,
                gap_count: None,
                gap_seed: None,
                image: clean.clone(),
            });
        }
        if !grid.explicit.is_empty() {
            let image = degrade(clean, &DegradationSpec::explicit(grid.explicit.clone()))
                .map_err(|e| HarnessError::Spec(format!("degradation.explicit: {e}")))?;
            cases.push(DegradeCase {
                label: "explicit",
                gap_width: None,
                gap_count: Some(grid.explicit.len()),
                gap_seed: None,
                image,
            });
        }
        if let Some(random) = &grid.random {
            for &width in &random.widths {
                for &count in &random.counts {
                    for &seed in &random.seeds {
                        let spec = DegradationSpec {
                            straight_margin: random.straight_margin,
                            ..DegradationSpec::random(count, width, seed)
                        };
                        let image = degrade(clean, &spec)
                            .map_err(|e| HarnessError::Spec(format!("degradation.random: {e}")))?;
                        cases.push(DegradeCase {
                            label: "random",
                            gap_width: Some(width),
                            gap_count: Some(count),
                            gap_seed: Some(seed),
                            image,
                        });
                    }
                }
            }
        }
        if cases.is_empty() {
            return Err(HarnessError::Spec("degradation: no cases selected".into()));
        }
        Ok(cases)
    }

    fn inner_points(&self, truths: &[GroundTruth]) -> Result<Vec<PixelPos>, HarnessError> {
        let target = || {
            truths.get(self.target).ok_or_else(|| {
                HarnessError::Spec(format!(
                    "target: region {} does not exist ({} regions)",
                    self.target,
                    truths.len()
                ))
            })
        };
        match &self.inner {
            InnerPlacement::Center => {
                let t = target()?;
                let c = t.centroid;
                let nearest = t
                    .pixels
                    .iter()
                    .min_by(|a, b| {
                        a.to_point()
                            .distance(c)
                            .total_cmp(&b.to_point().distance(c))
                    })
                    .copied()
                    .ok_or_else(|| HarnessError::Spec("target: region is empty".into()))?;
                Ok(vec![nearest])
            }
            InnerPlacement::Random { seed, count } => {
                let t = target()?;
                let pixels: Vec<PixelPos> = t.pixels.iter().copied().collect();
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| pixels[rng.gen_range(0..pixels.len())])
                    .collect())
            }
            InnerPlacement::Points(points) => Ok(points.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Record per-run wall time. Off by default so output is byte-stable.
    pub timing: bool,
}

struct Job<'a> {
    case: &'a DegradeCase,
    inner: PixelPos,
    /// Missing when the inner point is an edge pixel of the clean scene or
    /// lies outside it.
    truth: Option<&'a GroundTruth>,
    cfg: EstimatorConfig,
    repetition: u32,
}

fn run_job(scene: &str, job: &Job<'_>, opts: SweepOptions) -> ResultRow {
    let started = Instant::now();
    let outcome = match job.truth {
        Some(_) => estimate(&job.case.image, job.inner, &job.cfg),
        None => Err(EstimateError::LostObject(job.inner)),
    };
    let wall = started.elapsed();
    let mut row = ResultRow {
        scene: scene.to_string(),
        degradation: job.case.label.to_string(),
        gap_width: job.case.gap_width,
        gap_count: job.case.gap_count,
        gap_seed: job.case.gap_seed,
        inner_x: job.inner.x,
        inner_y: job.inner.y,
        technique: job.cfg.technique,
        n: job.cfg.n,
        y: job.cfg.y,
        m: job.cfg.m,
        b: job.cfg.b,
        max_iterations: job.cfg.max_iterations,
        epsilon: job.cfg.epsilon,
        repetition: job.repetition,
        status: "ok".to_string(),
        centroid_x: None,
        centroid_y: None,
        area: None,
        out_x: None,
        out_y: None,
        truth_area: job.truth.map(|t| t.area),
        centroid_error: None,
        area_ratio: None,
        iterations: None,
        converged: None,
        work: None,
        wall_time_us: opts.timing.then_some(wall.as_secs_f64() * 1e6),
    };
    match outcome {
        Ok((est, trace)) => {
            let truth = job.truth.expect("checked before estimating");
            let report = compare(&est, truth).expect("truth regions are non-empty");
            row.centroid_x = Some(est.centroid.x);
            row.centroid_y = Some(est.centroid.y);
            row.area = Some(est.area);
            row.out_x = Some(est.inner_point.x);
            row.out_y = Some(est.inner_point.y);
            row.centroid_error = Some(report.centroid_error);
            row.area_ratio = Some(report.area_ratio);
            row.iterations = Some(trace.iterations.len() as u32);
            row.converged = Some(trace.converged);
            row.work = Some(trace.work());
        }
        Err(EstimateError::LostObject(_)) => row.status = "lost".to_string(),
        Err(EstimateError::Config(msg)) => row.status = format!("config: {msg}"),
    }
    row
}

/// Runs the full grid. Rows come out in grid-major order (degradation case,
/// inner point, estimator configuration, repetition) regardless of how the
/// work is scheduled.
pub fn run_experiment(
    spec: &ExperimentSpec,
    opts: SweepOptions,
) -> Result<Vec<ResultRow>, HarnessError> {
    let prepared = spec.prepare()?;
    let truths: Vec<Option<GroundTruth>> = prepared
        .inner_points
        .iter()
        .map(|&p| flood_region(&prepared.clean, p).ok())
        .collect();

    let mut jobs = Vec::new();
    for case in &prepared.cases {
        for (inner, truth) in prepared.inner_points.iter().zip(&truths) {
            for cfg in &prepared.configs {
                for repetition in 0..prepared.repetitions {
                    jobs.push(Job {
                        case,
                        inner: *inner,
                        truth: truth.as_ref(),
                        cfg: *cfg,
                        repetition,
                    });
                }
            }
        }
    }
    let scene = prepared.scene_name.as_str();
    Ok(jobs
        .par_iter()
        .map(|job| run_job(scene, job, opts))
        .collect())
}
