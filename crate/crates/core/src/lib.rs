//! Color-coding estimation of non-induced tree (treelet) counts in sparse
//! graphs.
//!
//! Each iteration colors the graph at random and counts colorful copies of
//! the template with a dynamic program over a recursive split of the
//! template. The per-vertex neighbor traversal is factored out of the
//! recurrence so that every step becomes one of two dense kernels: a
//! batched sparse x dense product over the adjacency matrix (in a
//! row-partitioned CSC layout) and an element-wise multiply-add over count
//! table columns.
//!
//! ```
//! use treelet::{estimate, generate, template::path_template, EstimateConfig};
//!
//! let g = generate::complete(4);
//! let cfg = EstimateConfig::default().with_iterations(500).with_seed(1);
//! let est = estimate(&g, &path_template(3), &cfg).unwrap();
//! assert!((est.mean - 12.0).abs() < 2.0);
//! ```

pub mod bench;
pub mod catalog;
pub mod cli;
pub mod combinadics;
pub mod dp;
pub mod error;
pub mod estimator;
pub mod generate;
pub mod graph;
pub mod kernels;
pub mod oracle;
pub mod report;
pub mod template;

pub use dp::{
    dp_pass_naive, dp_pass_vectorized, init_leaf_table, random_coloring, ColorAssignment,
    CountingPlan, IterationResult,
};
pub use error::{Error, Result};
pub use estimator::{
    compare_distributions, estimate, treelet_distribution, Estimate, EstimateConfig, Iterations,
    Precision,
};
pub use graph::{build_csc_split, degree_stats, load_graph, CscSplitMatrix, Graph};
pub use kernels::{ema_accumulate, spmm_csc_split, spmv_reference, CountTable, CountValue};
pub use oracle::{exact_count, ExactCount};
pub use template::{
    automorphism_count, colorful_probability, load_template, partition_template,
    required_iterations, SubTemplateChain, TemplateTree,
};
