//! Output records: count results, run manifests, and the CSV files used for
//! treelet distributions and distance matrices.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{Estimate, Iterations, Precision};
use crate::graph::GraphSummary;

/// One template's result as printed by `count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub template: String,
    pub n_iterations: usize,
    pub mean: f64,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_iteration: Option<Vec<f64>>,
}

impl CountRecord {
    pub fn from_estimate(e: &Estimate, per_iteration: bool) -> Self {
        CountRecord {
            template: e.template.clone(),
            n_iterations: e.n_iterations,
            mean: e.mean,
            std_error: e.std_error,
            per_iteration: per_iteration.then(|| e.per_iteration.clone()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load: f64,
    pub partition: f64,
    pub per_iteration: Vec<f64>,
    pub total: f64,
}

/// Everything needed to rerun a `count` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub graph: String,
    pub templates: Vec<String>,
    pub root: usize,
    pub iterations: Iterations,
    pub n_iterations: usize,
    pub seed: u64,
    pub batch_size: usize,
    pub num_partitions: Option<usize>,
    pub resolved_partitions: usize,
    pub precision: Precision,
    pub threads: usize,
    pub mem_budget_bytes: Option<u64>,
    pub parallel_iterations: bool,
    pub per_iteration: bool,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountOutput {
    pub graph: GraphSummary,
    pub results: Vec<CountRecord>,
    pub manifest: RunManifest,
}

/// Writes a distribution as two CSV lines: template labels, then frequencies.
pub fn write_distribution_csv<W: Write>(
    mut out: W,
    labels: &[String],
    frequencies: &[f64],
) -> std::io::Result<()> {
    writeln!(out, "{}", labels.join(","))?;
    let row: Vec<String> = frequencies.iter().map(|f| format!("{f}")).collect();
    writeln!(out, "{}", row.join(","))
}

pub fn read_distribution_csv<R: BufRead>(source: R) -> Result<(Vec<String>, Vec<f64>)> {
    let mut lines = source
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty distribution file"))?;
    let header = header.map_err(|e| Error::parse(1, e.to_string()))?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let (idx, row) = lines
        .next()
        .ok_or_else(|| Error::parse(2, "missing frequency row"))?;
    let row = row.map_err(|e| Error::parse(idx + 1, e.to_string()))?;
    let values = row
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(idx + 1, format!("not a number: {s:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != labels.len() {
        return Err(Error::parse(
            idx + 1,
            format!("{} labels but {} values", labels.len(), values.len()),
        ));
    }
    Ok((labels, values))
}

/// Square distance matrix with a header row and a name column.
pub fn write_distance_csv<W: Write>(
    mut out: W,
    names: &[String],
    matrix: &[Vec<f64>],
) -> std::io::Result<()> {
    writeln!(out, ",{}", names.join(","))?;
    for (name, row) in names.iter().zip(matrix) {
        let cells: Vec<String> = row.iter().map(|d| format!("{d}")).collect();
        writeln!(out, "{name},{}", cells.join(","))?;
    }
    Ok(())
}
