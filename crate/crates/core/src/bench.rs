//! Timing harness for the SpMM and eMA kernels on synthetic graphs.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::Precision;
use crate::generate;
use crate::graph::{build_csc_split, default_num_partitions};
use crate::kernels::{
    ema_accumulate, spmm_csc_split_into, spmv_reference, CountTable, CountValue, SpmmScratch,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub num_vertices: usize,
    pub avg_degree: f64,
    pub batch_size: usize,
    pub num_partitions: Option<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub precision: Precision,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            num_vertices: 100_000,
            avg_degree: 16.0,
            batch_size: 16,
            num_partitions: None,
            repetitions: 10,
            seed: 0,
            precision: Precision::F32,
        }
    }
}

/// Per-call averages. `flops` counts one add per nonzero and column for the
/// sparse kernels and a multiply plus an add per element for eMA; `bytes` is
/// a streaming model (indices, gathered inputs, outputs), not a measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTiming {
    pub seconds: f64,
    pub flops: f64,
    pub bytes: f64,
    pub gflops: f64,
    pub gbytes_per_sec: f64,
}

impl KernelTiming {
    fn new(seconds: f64, flops: f64, bytes: f64) -> Self {
        KernelTiming {
            seconds,
            flops,
            bytes,
            gflops: flops / seconds / 1e9,
            gbytes_per_sec: bytes / seconds / 1e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub num_edges: usize,
    pub nnz: usize,
    pub num_partitions: usize,
    pub threads: usize,
    /// One SpMM call over `batch_size` columns.
    pub spmm: KernelTiming,
    /// `batch_size` CSR SpMV calls, for comparison with one SpMM call.
    pub spmv_reference: KernelTiming,
    /// One eMA call over a single column of length `n`.
    pub ema: KernelTiming,
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    match cfg.precision {
        Precision::F32 => run::<f32>(cfg),
        Precision::F64 => run::<f64>(cfg),
    }
}

fn run<T: CountValue>(cfg: &BenchConfig) -> Result<BenchReport> {
    let n = cfg.num_vertices;
    if n < 2 || cfg.batch_size == 0 || cfg.repetitions == 0 {
        return Err(Error::InvalidArgument(
            "bench needs n >= 2, a positive batch size and at least one repetition".into(),
        ));
    }
    let m = (cfg.avg_degree * n as f64 / 2.0).round() as usize;
    let g = generate::gnm(n, m, cfg.seed);
    let threads = rayon::current_num_threads();
    let partitions = cfg
        .num_partitions
        .unwrap_or_else(|| default_num_partitions(n, threads));
    let a = build_csc_split(&g, partitions)?;
    let nnz = a.num_entries();
    let b = cfg.batch_size;
    let size = std::mem::size_of::<T>() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let columns: Vec<Vec<T>> = (0..b)
        .map(|_| {
            (0..n)
                .map(|_| T::from_f64(rng.gen_range(0.0..4.0)))
                .collect()
        })
        .collect();
    let m_table = CountTable::from_columns(n, &columns)?;

    let mut scratch = SpmmScratch::new();
    spmm_csc_split_into(&a, &m_table, 0, b, &mut scratch)?;
    let t0 = Instant::now();
    for _ in 0..cfg.repetitions {
        spmm_csc_split_into(&a, &m_table, 0, b, &mut scratch)?;
    }
    let spmm_secs = t0.elapsed().as_secs_f64() / cfg.repetitions as f64;
    let spmm = KernelTiming::new(
        spmm_secs,
        (nnz * b) as f64,
        nnz as f64 * 8.0 + (nnz * b) as f64 * size + 2.0 * (n * b) as f64 * size,
    );

    let t0 = Instant::now();
    for _ in 0..cfg.repetitions {
        for col in &columns {
            std::hint::black_box(spmv_reference(&g, col)?);
        }
    }
    let spmv_secs = t0.elapsed().as_secs_f64() / cfg.repetitions as f64;
    let spmv = KernelTiming::new(
        spmv_secs,
        (nnz * b) as f64,
        b as f64 * (nnz as f64 * (4.0 + size) + (n as f64) * (8.0 + size)),
    );

    let mut dst = vec![T::ZERO; n];
    let t0 = Instant::now();
    for _ in 0..cfg.repetitions {
        ema_accumulate(&mut dst, &columns[0], &columns[b.min(2) - 1])?;
    }
    std::hint::black_box(&dst);
    let ema_secs = t0.elapsed().as_secs_f64() / cfg.repetitions as f64;
    let ema = KernelTiming::new(ema_secs, 2.0 * n as f64, 4.0 * n as f64 * size);

    Ok(BenchReport {
        config: cfg.clone(),
        num_edges: g.num_edges(),
        nnz,
        num_partitions: partitions,
        threads,
        spmm,
        spmv_reference: spmv,
        ema,
    })
}
