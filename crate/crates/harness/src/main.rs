use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use castfeat::edge_image::{
    degrade, generate_scene, load_pbm, presets, save_pbm, DegradationSpec, SceneSpec,
};
use castfeat::{estimate, EstimateError, EstimatorConfig, PixelPos, Point, Technique, Trace};
use castfeat_harness::{
    bench, render_overlay, run_experiment, write_csv, ExperimentSpec, HarnessError, SweepOptions,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "castfeat",
    version,
    about = "Barrier-aware object feature estimation experiments"
)]
struct Cli {
    /// Overrides every seed in the inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a scene into a PBM edge image.
    Generate(GenerateArgs),
    /// Cut gaps into an edge image.
    Degrade(DegradeArgs),
    /// Run one estimator and print the estimate as JSON.
    Estimate(EstimateArgs),
    /// Run an experiment grid and write a CSV table.
    Sweep(SweepArgs),
    /// Draw one iteration of a saved trace as a PPM overlay.
    Render(RenderArgs),
    /// Time every configuration of an experiment.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Built-in scene: disk, rectangle or hand-v1.
    #[arg(long, conflicts_with = "scene")]
    preset: Option<String>,
    /// Scene JSON file.
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the ground-truth areas and centroids as JSON.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct DegradeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Degradation JSON file; overrides --gaps and --width.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    gaps: usize,
    #[arg(long, default_value_t = 1)]
    width: u32,
    /// Only cut gaps into straight wall runs with this much clearance.
    #[arg(long)]
    straight_margin: Option<u32>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Inner point as `x,y`.
    #[arg(long, value_parser = parse_pixel)]
    inner: PixelPos,
    /// Estimator config JSON; command-line knobs below take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    technique: Option<Technique>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    y: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    max_iterations: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Write the full trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Record wall time per run (makes the output machine dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = 0)]
    iteration: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5)]
    runs: u32,
}

fn parse_pixel(s: &str) -> Result<PixelPos, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let coord = |v: &str| v.trim().parse::<i32>().map_err(|e| format!("`{v}`: {e}"));
    Ok(PixelPos::new(coord(x)?, coord(y)?))
}

fn read(path: &Path) -> Result<Vec<u8>, HarnessError> {
    fs::read(path).map_err(|e| HarnessError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let bytes = read(path)?;
    serde_json::from_slice(&bytes)
        .map_err(|e| HarnessError::Spec(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

fn load_image(path: &Path) -> Result<castfeat::EdgeImage, HarnessError> {
    load_pbm(&read(path)?).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

fn load_experiment(path: &Path, seed: Option<u64>) -> Result<ExperimentSpec, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut spec = ExperimentSpec::from_json(&text)?;
    spec.resolve_scene(path.parent().unwrap_or(Path::new(".")))?;
    if let Some(seed) = seed {
        spec.override_seed(seed);
    }
    Ok(spec)
}

#[derive(Serialize)]
struct TruthSummary {
    area: usize,
    centroid: Point,
}

fn generate(args: GenerateArgs) -> Result<(), HarnessError> {
    let scene: SceneSpec = match (&args.preset, &args.scene) {
        (Some(name), _) => presets::by_name(name)
            .ok_or_else(|| HarnessError::Spec(format!("--preset: unknown preset `{name}`")))?,
        (None, Some(path)) => read_json(path)?,
        (None, None) => {
            return Err(HarnessError::Spec(
                "one of --preset or --scene is required".into(),
            ))
        }
    };
    let (image, truths) =
        generate_scene(&scene).map_err(|e| HarnessError::Spec(format!("scene: {e}")))?;
    write(&args.out, &save_pbm(&image))?;
    if let Some(path) = &args.truth {
        let summary: Vec<TruthSummary> = truths
            .iter()
            .map(|t| TruthSummary {
                area: t.area,
                centroid: t.centroid,
            })
            .collect();
        write(path, &to_json(&summary))?;
    }
    Ok(())
}

fn degrade_cmd(args: DegradeArgs, seed: Option<u64>) -> Result<(), HarnessError> {
    let image = load_image(&args.input)?;
    let mut spec = match &args.spec {
        Some(path) => read_json::<DegradationSpec>(path)?,
        None => DegradationSpec {
            straight_margin: args.straight_margin,
            ..DegradationSpec::random(args.gaps, args.width, 0)
        },
    };
    if let Some(seed) = seed {
        spec.rng_seed = seed;
    }
    let out =
        degrade(&image, &spec).map_err(|e| HarnessError::Spec(format!("degradation: {e}")))?;
    write(&args.out, &save_pbm(&out))
}

#[derive(Serialize)]
struct EstimateOutput {
    technique: Technique,
    centroid: Point,
    area: f64,
    inner_point: PixelPos,
    iterations: usize,
    converged: bool,
    work: u64,
}

fn estimate_cmd(args: EstimateArgs) -> Result<(), HarnessError> {
    let image = load_image(&args.input)?;
    let mut cfg: EstimatorConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => EstimatorConfig::default(),
    };
    cfg.technique = args.technique.unwrap_or(cfg.technique);
    cfg.n = args.n.unwrap_or(cfg.n);
    cfg.y = args.y.unwrap_or(cfg.y);
    cfg.m = args.m.unwrap_or(cfg.m);
    cfg.b = args.b.unwrap_or(cfg.b);
    cfg.max_iterations = args.max_iterations.unwrap_or(cfg.max_iterations);
    cfg.epsilon = args.epsilon.unwrap_or(cfg.epsilon);

    let (est, trace) = estimate(&image, args.inner, &cfg).map_err(|e| match e {
        EstimateError::LostObject(_) => HarnessError::Spec(format!("--inner: {e}")),
        EstimateError::Config(_) => HarnessError::Spec(e.to_string()),
    })?;
    if let Some(path) = &args.trace {
        write(path, &to_json(&trace))?;
    }
    let out = EstimateOutput {
        technique: cfg.technique,
        centroid: est.centroid,
        area: est.area,
        inner_point: est.inner_point,
        iterations: trace.iterations.len(),
        converged: trace.converged,
        work: trace.work(),
    };
    print!(
        "{}",
        String::from_utf8(to_json(&out)).expect("json is utf-8")
    );
    Ok(())
}

fn sweep(args: SweepArgs, seed: Option<u64>) -> Result<(), HarnessError> {
    let spec = load_experiment(&args.spec, seed)?;
    let rows = run_experiment(
        &spec,
        SweepOptions {
            timing: args.timing,
        },
    )?;
    let file = fs::File::create(&args.out).map_err(|e| HarnessError::io(&args.out, e))?;
    write_csv(std::io::BufWriter::new(file), &rows)
}

fn render(args: RenderArgs) -> Result<(), HarnessError> {
    let image = load_image(&args.input)?;
    let trace: Trace = read_json(&args.trace)?;
    write(&args.out, &render_overlay(&image, &trace, args.iteration)?)
}

fn bench_cmd(args: BenchArgs, seed: Option<u64>) -> Result<(), HarnessError> {
    let spec = load_experiment(&args.spec, seed)?;
    let rows = bench::bench(&spec, args.runs)?;
    let file = fs::File::create(&args.out).map_err(|e| HarnessError::io(&args.out, e))?;
    bench::write_bench_csv(std::io::BufWriter::new(file), &rows)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Degrade(args) => degrade_cmd(args, cli.seed),
        Command::Estimate(args) => estimate_cmd(args),
        Command::Sweep(args) => sweep(args, cli.seed),
        Command::Render(args) => render(args),
        Command::Bench(args) => bench_cmd(args, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("castfeat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
