//! Result rows and their CSV encoding.

use std::io::{Read, Write};

use castfeat::Technique;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// First line of every results file. Bump the version when columns change.
pub const SCHEMA_LINE: &str = "# castfeat-results v1";

/// One estimator run. Fields that only exist for successful runs are empty
/// when `status` is not `ok`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scene: String,
    pub degradation: String,
    pub gap_width: Option<u32>,
    pub gap_count: Option<usize>,
    pub gap_seed: Option<u64>,
    pub inner_x: i32,
    pub inner_y: i32,
    pub technique: Technique,
    pub n: u32,
    pub y: u32,
    pub m: u32,
    pub b: u32,
    pub max_iterations: u32,
    pub epsilon: f64,
    pub repetition: u32,
    pub status: String,
    pub centroid_x: Option<f64>,
    pub centroid_y: Option<f64>,
    pub area: Option<f64>,
    pub out_x: Option<i32>,
    pub out_y: Option<i32>,
    /// Oracle area; empty when the inner point has no region in the clean scene.
    pub truth_area: Option<usize>,
    pub centroid_error: Option<f64>,
    pub area_ratio: Option<f64>,
    pub iterations: Option<u32>,
    pub converged: Option<bool>,
    /// Barrier pixel probes; identical on every machine.
    pub work: Option<u64>,
    pub wall_time_us: Option<f64>,
}

pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<(), HarnessError> {
    writeln!(out, "{SCHEMA_LINE}")
        .map_err(|e| HarnessError::Io(format!("writing results: {e}")))?;
    let mut writer = csv::WriterBuilder::new()
        .comment(Some(b'#'))
        .from_writer(out);
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| HarnessError::Io(format!("writing results: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| HarnessError::Io(format!("writing results: {e}")))?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, HarnessError> {
    let mut text = String::new();
    let mut input = input;
    input
        .read_to_string(&mut text)
        .map_err(|e| HarnessError::Io(format!("reading results: {e}")))?;
    let first = text.lines().next().unwrap_or("");
    if first != SCHEMA_LINE {
        return Err(HarnessError::Spec(format!(
            "results: expected schema line `{SCHEMA_LINE}`, found `{first}`"
        )));
    }
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<ResultRow>, _>>()
        .map_err(|e| HarnessError::Spec(format!("results: {e}")))
}
