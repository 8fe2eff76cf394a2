//! The outer color-coding loop and treelet distributions built on it.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::{dp_pass_vectorized_with, random_coloring, CountingPlan, DpWorkspace};
use crate::error::{Error, Result};
use crate::graph::{build_csc_split, default_num_partitions, Graph};
use crate::kernels::CountValue;
use crate::template::{required_iterations, TemplateTree, MAX_TEMPLATE_SIZE};

/// Count-table value type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

impl Precision {
    pub fn value_size(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F64 => 8,
        }
    }
}

/// How many iterations to run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Iterations {
    Fixed(usize),
    /// `(epsilon, delta)` approximation bound, converted with
    /// [`required_iterations`].
    Bound {
        epsilon: f64,
        delta: f64,
    },
}

impl Iterations {
    pub fn resolve(self, k: usize) -> Result<usize> {
        match self {
            Iterations::Fixed(0) => Err(Error::InvalidArgument(
                "iteration count must be at least 1".into(),
            )),
            Iterations::Fixed(n) => Ok(n),
            Iterations::Bound { epsilon, delta } => required_iterations(epsilon, delta, k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub iterations: Iterations,
    pub seed: u64,
    pub batch_size: usize,
    /// `None` picks eight partitions per worker thread.
    pub num_partitions: Option<usize>,
    pub precision: Precision,
    /// Refuse to run when the count tables would need more than this.
    pub mem_budget_bytes: Option<u64>,
    /// Run independent iterations concurrently (one table set per iteration).
    pub parallel_iterations: bool,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            iterations: Iterations::Fixed(100),
            seed: 0,
            batch_size: 16,
            num_partitions: None,
            precision: Precision::F32,
            mem_budget_bytes: None,
            parallel_iterations: false,
        }
    }
}

impl EstimateConfig {
    pub fn with_iterations(mut self, n: usize) -> Self {
        self.iterations = Iterations::Fixed(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub partition: f64,
    pub per_iteration: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub template: String,
    pub n_iterations: usize,
    pub mean: f64,
    pub std_error: f64,
    pub per_iteration: Vec<f64>,
    #[serde(skip)]
    pub num_partitions: usize,
    #[serde(skip)]
    pub timings: PhaseTimings,
}

impl Estimate {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.template = label.into();
        self
    }
}

/// Sample mean and standard error of the mean (0 for a single sample).
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Estimates the number of non-induced copies of `t` in `g`.
pub fn estimate(g: &Graph, t: &TemplateTree, cfg: &EstimateConfig) -> Result<Estimate> {
    let k = t.size();
    if k > MAX_TEMPLATE_SIZE {
        return Err(Error::InvalidArgument(format!(
            "templates are limited to {MAX_TEMPLATE_SIZE} vertices, got {k}"
        )));
    }
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let iterations = cfg.iterations.resolve(k)?;
    let plan = CountingPlan::new(t)?;

    let value_size = cfg.precision.value_size();
    let tables = plan.table_bytes(n, value_size);
    let scratch = 2 * (n * cfg.batch_size * value_size) as u64;
    let per_iteration = tables + scratch;
    let required = if cfg.parallel_iterations {
        per_iteration * iterations.min(rayon::current_num_threads()) as u64
    } else {
        per_iteration
    };
    if let Some(budget) = cfg.mem_budget_bytes {
        if required > budget {
            return Err(Error::MemoryBudget { required, budget });
        }
    }

    let start = Instant::now();
    let partitions = cfg
        .num_partitions
        .unwrap_or_else(|| default_num_partitions(n, rayon::current_num_threads()));
    let a = build_csc_split(g, partitions)?;
    let partition_secs = start.elapsed().as_secs_f64();

    let results = match cfg.precision {
        Precision::F32 => run_iterations::<f32>(g, &a, &plan, cfg, iterations)?,
        Precision::F64 => run_iterations::<f64>(g, &a, &plan, cfg, iterations)?,
    };
    let (values, times): (Vec<f64>, Vec<f64>) = results.into_iter().unzip();
    let (mean, std_error) = mean_and_std_error(&values);
    Ok(Estimate {
        template: t.canonical_form(),
        n_iterations: iterations,
        mean,
        std_error,
        per_iteration: values,
        num_partitions: partitions,
        timings: PhaseTimings {
            partition: partition_secs,
            per_iteration: times,
            total: start.elapsed().as_secs_f64(),
        },
    })
}

fn run_iterations<T: CountValue>(
    g: &Graph,
    a: &crate::graph::CscSplitMatrix,
    plan: &CountingPlan,
    cfg: &EstimateConfig,
    iterations: usize,
) -> Result<Vec<(f64, f64)>> {
    let n = g.num_vertices();
    let k = plan.num_colors();
    let one = |ws: &mut DpWorkspace<T>, j: usize| -> Result<(f64, f64)> {
        let t0 = Instant::now();
        let coloring = random_coloring(n, k, cfg.seed, j as u64);
        let res = dp_pass_vectorized_with(g, a, plan, &coloring, cfg.batch_size, ws)?;
        ws.recycle(res.top);
        Ok((res.final_count, t0.elapsed().as_secs_f64()))
    };
    if cfg.parallel_iterations {
        (0..iterations)
            .into_par_iter()
            .map_init(DpWorkspace::new, one)
            .collect()
    } else {
        let mut ws = DpWorkspace::new();
        (0..iterations).map(|j| one(&mut ws, j)).collect()
    }
}

/// Normalized frequencies of a family of templates in one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub labels: Vec<String>,
    pub counts: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// Every count was zero, so `frequencies` is all zeros.
    pub degenerate: bool,
}

/// Scales `counts` to sum to 1; an all-zero input stays zero and is flagged.
pub fn normalize(labels: Vec<String>, counts: Vec<f64>) -> Distribution {
    let total: f64 = counts.iter().sum();
    let degenerate = total <= 0.0;
    let frequencies = if degenerate {
        vec![0.0; counts.len()]
    } else {
        counts.iter().map(|c| c / total).collect()
    };
    Distribution {
        labels,
        counts,
        frequencies,
        degenerate,
    }
}

/// Estimates every template and normalizes the mean counts.
pub fn treelet_distribution(
    g: &Graph,
    templates: &[(String, TemplateTree)],
    cfg: &EstimateConfig,
) -> Result<Distribution> {
    if templates.is_empty() {
        return Err(Error::InvalidArgument("no templates given".into()));
    }
    let estimates: Vec<Estimate> = templates
        .par_iter()
        .map(|(_, t)| estimate(g, t, cfg))
        .collect::<Result<_>>()?;
    Ok(normalize(
        templates.iter().map(|(l, _)| l.clone()).collect(),
        estimates.iter().map(|e| e.mean).collect(),
    ))
}

/// Symmetric matrix of pairwise L1 distances.
pub fn compare_distributions(dists: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if let Some(first) = dists.first() {
        if let Some(bad) = dists.iter().find(|d| d.len() != first.len()) {
            return Err(Error::LengthMismatch {
                expected: first.len(),
                actual: bad.len(),
            });
        }
    }
    let mut out = vec![vec![0.0; dists.len()]; dists.len()];
    for i in 0..dists.len() {
        for j in i + 1..dists.len() {
            let d: f64 = dists[i]
                .iter()
                .zip(&dists[j])
                .map(|(x, y)| (x - y).abs())
                .sum();
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    Ok(out)
}
