//! Timing and work-counter benchmarks.

use std::time::Instant;

use castfeat::{estimate, EstimateError, Technique};
use serde::{Deserialize, Serialize};

use crate::experiment::ExperimentSpec;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub degradation: String,
    pub inner_x: i32,
    pub inner_y: i32,
    pub technique: Technique,
    pub n: u32,
    pub y: u32,
    pub m: u32,
    pub b: u32,
    pub runs: u32,
    pub median_us: f64,
    /// Empty when the inner point is lost.
    pub work: Option<u64>,
}

/// Runs every grid point once to warm up, then `runs` more times, reporting
/// the median wall time. Grid points run one after another so timings do
/// not interfere.
pub fn bench(spec: &ExperimentSpec, runs: u32) -> Result<Vec<BenchRow>, HarnessError> {
    if runs == 0 {
        return Err(HarnessError::Spec("runs: must be at least 1".into()));
    }
    let prepared = spec.prepare()?;
    let mut rows = Vec::new();
    for case in &prepared.cases {
        for &inner in &prepared.inner_points {
            for cfg in &prepared.configs {
                let work = match estimate(&case.image, inner, cfg) {
                    Ok((_, trace)) => Some(trace.work()),
                    Err(EstimateError::LostObject(_)) => None,
                    Err(e) => return Err(HarnessError::Spec(format!("estimators: {e}"))),
                };
                let mut times: Vec<f64> = (0..runs)
                    .map(|_| {
                        let started = Instant::now();
                        let _ = std::hint::black_box(estimate(&case.image, inner, cfg));
                        started.elapsed().as_secs_f64() * 1e6
                    })
                    .collect();
                times.sort_by(f64::total_cmp);
                let mid = times.len() / 2;
                let median_us = if times.len() % 2 == 1 {
                    times[mid]
                } else {
                    (times[mid - 1] + times[mid]) / 2.0
                };
                rows.push(BenchRow {
                    degradation: case.label.to_string(),
                    inner_x: inner.x,
                    inner_y: inner.y,
                    technique: cfg.technique,
                    n: cfg.n,
                    y: cfg.y,
                    m: cfg.m,
                    b: cfg.b,
                    runs,
                    median_us,
                    work,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_bench_csv<W: std::io::Write>(out: W, rows: &[BenchRow]) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| HarnessError::Io(format!("writing bench table: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| HarnessError::Io(format!("writing bench table: {e}")))
}
