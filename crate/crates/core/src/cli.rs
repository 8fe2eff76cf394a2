//! Command-line front end. `main.rs` only forwards to [`main`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, BenchConfig};
use crate::catalog::write_templates;
use crate::error::{Error, Result};
use crate::estimator::{
    compare_distributions, estimate, normalize, EstimateConfig, Iterations, Precision,
};
use crate::graph::{load_graph_file, Graph};
use crate::oracle::exact_count;
use crate::report::{
    read_distribution_csv, write_distance_csv, write_distribution_csv, CountOutput, CountRecord,
    RunManifest, Timings,
};
use crate::template::{load_template_file, TemplateTree};

#[derive(Debug, Parser)]
#[command(name = "treelet", version, about = "Color-coding treelet counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate template counts and print JSON results with a run manifest.
    Count(CountArgs),
    /// Normalized treelet distribution of one graph, as CSV.
    Distribution(CountArgs),
    /// Pairwise L1 distances between distribution CSV files.
    Compare {
        files: Vec<PathBuf>,
        #[arg(short, long, env = "TREELET_OUTPUT")]
        output: Option<PathBuf>,
    },
    /// Exact embedding count by backtracking (small instances only).
    Oracle(CountArgs),
    /// Time the SpMM and eMA kernels on a synthetic graph.
    Bench(BenchArgs),
    /// Write the bundled template files.
    GenTemplates {
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print `{"n","m","avg_deg","max_deg"}` for a graph.
    Summary {
        #[arg(short, long, env = "TREELET_GRAPH")]
        graph: PathBuf,
    },
    /// Rerun a `count` invocation from its JSON output or manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrecisionArg {
    F32,
    F64,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::F32 => Precision::F32,
            PrecisionArg::F64 => Precision::F64,
        }
    }
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(short, long, env = "TREELET_GRAPH")]
    graph: PathBuf,
    #[arg(short, long = "template", required = true)]
    templates: Vec<PathBuf>,
    /// Template root vertex.
    #[arg(long, default_value_t = 0, env = "TREELET_ROOT")]
    root: usize,
    #[arg(short = 'N', long, env = "TREELET_ITERATIONS", conflicts_with_all = ["epsilon", "delta"])]
    iterations: Option<usize>,
    #[arg(long, env = "TREELET_EPSILON", requires = "delta")]
    epsilon: Option<f64>,
    #[arg(long, env = "TREELET_DELTA", requires = "epsilon")]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0, env = "TREELET_SEED")]
    seed: u64,
    #[arg(long, default_value_t = 16, env = "TREELET_BATCH_SIZE")]
    batch_size: usize,
    /// CSC-Split partitions (default: 8 per thread).
    #[arg(long, env = "TREELET_PARTITIONS")]
    partitions: Option<usize>,
    #[arg(long, env = "TREELET_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "f32", env = "TREELET_PRECISION")]
    precision: PrecisionArg,
    #[arg(long, default_value_t = 8.0, env = "TREELET_MEM_BUDGET_GB")]
    mem_budget_gb: f64,
    /// Run iterations concurrently.
    #[arg(long, env = "TREELET_PARALLEL_ITERATIONS")]
    parallel_iterations: bool,
    /// Include every iteration's estimate in the JSON output.
    #[arg(long)]
    per_iteration: bool,
    #[arg(short, long, env = "TREELET_OUTPUT")]
    output: Option<PathBuf>,
}

impl CountArgs {
    fn iterations(&self) -> Iterations {
        match (self.iterations, self.epsilon, self.delta) {
            (Some(n), _, _) => Iterations::Fixed(n),
            (None, Some(epsilon), Some(delta)) => Iterations::Bound { epsilon, delta },
            _ => Iterations::Fixed(100),
        }
    }

    fn config(&self) -> EstimateConfig {
        EstimateConfig {
            iterations: self.iterations(),
            seed: self.seed,
            batch_size: self.batch_size,
            num_partitions: self.partitions,
            precision: self.precision.into(),
            mem_budget_bytes: Some((self.mem_budget_gb * 1e9) as u64),
            parallel_iterations: self.parallel_iterations,
        }
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(short, long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 16.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    #[arg(long)]
    partitions: Option<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "TREELET_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "f32")]
    precision: PrecisionArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn label(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    for ext in [".txt.gz", ".gz", ".txt"] {
        if let Some(stem) = name.strip_suffix(ext) {
            return stem.to_string();
        }
    }
    name
}

fn load_templates(paths: &[PathBuf], root: usize) -> Result<Vec<(String, TemplateTree)>> {
    paths
        .iter()
        .map(|p| Ok((label(p), load_template_file(p, Some(root))?)))
        .collect()
}

fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn emit(output: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
            f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn run_count(args: &CountArgs) -> Result<CountOutput> {
    let start = Instant::now();
    let g: Graph = load_graph_file(&args.graph)?;
    let templates = load_templates(&args.templates, args.root)?;
    let load = start.elapsed().as_secs_f64();
    let cfg = args.config();

    with_threads(args.threads, || -> Result<CountOutput> {
        let threads = rayon::current_num_threads();
        let mut results = Vec::new();
        let mut timings = Timings {
            load,
            ..Timings::default()
        };
        let mut resolved_partitions = 0;
        let mut n_iterations = 0;
        for (name, t) in &templates {
            let est = estimate(&g, t, &cfg)?.with_label(name.clone());
            timings.partition += est.timings.partition;
            timings.per_iteration.extend(&est.timings.per_iteration);
            resolved_partitions = est.num_partitions;
            n_iterations = est.n_iterations;
            results.push(CountRecord::from_estimate(&est, args.per_iteration));
        }
        timings.total = start.elapsed().as_secs_f64();
        Ok(CountOutput {
            graph: g.summary(),
            results,
            manifest: RunManifest {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                graph: args.graph.display().to_string(),
                templates: args
                    .templates
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect(),
                root: args.root,
                iterations: cfg.iterations,
                n_iterations,
                seed: cfg.seed,
                batch_size: cfg.batch_size,
                num_partitions: cfg.num_partitions,
                resolved_partitions,
                precision: cfg.precision,
                threads,
                mem_budget_bytes: cfg.mem_budget_bytes,
                parallel_iterations: cfg.parallel_iterations,
                per_iteration: args.per_iteration,
                timings,
            },
        })
    })?
}

fn print_table(out: &CountOutput) {
    eprintln!(
        "{:<20} {:>10} {:>18} {:>14}",
        "template", "iters", "mean", "std_error"
    );
    for r in &out.results {
        eprintln!(
            "{:<20} {:>10} {:>18.6e} {:>14.4e}",
            r.template, r.n_iterations, r.mean, r.std_error
        );
    }
    let t = &out.manifest.timings;
    eprintln!(
        "load {:.3}s  partition {:.3}s  iterations {:.3}s  total {:.3}s",
        t.load,
        t.partition,
        t.per_iteration.iter().sum::<f64>(),
        t.total
    );
}

fn count_args_from_manifest(m: &RunManifest) -> CountArgs {
    let (iterations, epsilon, delta) = match m.iterations {
        Iterations::Fixed(n) => (Some(n), None, None),
        Iterations::Bound { epsilon, delta } => (None, Some(epsilon), Some(delta)),
    };
    CountArgs {
        graph: m.graph.clone().into(),
        templates: m.templates.iter().map(PathBuf::from).collect(),
        root: m.root,
        iterations,
        epsilon,
        delta,
        seed: m.seed,
        batch_size: m.batch_size,
        partitions: m.num_partitions,
        threads: Some(m.threads),
        precision: match m.precision {
            Precision::F32 => PrecisionArg::F32,
            Precision::F64 => PrecisionArg::F64,
        },
        mem_budget_gb: m
            .mem_budget_bytes
            .map(|b| b as f64 / 1e9)
            .unwrap_or(f64::MAX),
        parallel_iterations: m.parallel_iterations,
        per_iteration: m.per_iteration,
        output: None,
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Count(args) => {
            let out = run_count(&args)?;
            print_table(&out);
            emit(
                &args.output,
                stdout,
                &(serde_json::to_string_pretty(&out)? + "\n"),
            )
        }
        Command::Replay { manifest } => {
            let text = std::fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let m: RunManifest = match value.get("manifest") {
                Some(inner) => serde_json::from_value(inner.clone())?,
                None => serde_json::from_value(value)?,
            };
            let out = run_count(&count_args_from_manifest(&m))?;
            print_table(&out);
            emit(&None, stdout, &(serde_json::to_string_pretty(&out)? + "\n"))
        }
        Command::Distribution(args) => {
            let out = run_count(&args)?;
            print_table(&out);
            let dist = normalize(
                out.results.iter().map(|r| r.template.clone()).collect(),
                out.results.iter().map(|r| r.mean).collect(),
            );
            if dist.degenerate {
                eprintln!("warning: every template count is zero; distribution is all zeros");
            }
            let mut buf = Vec::new();
            write_distribution_csv(&mut buf, &dist.labels, &dist.frequencies)
                .map_err(|e| Error::io("<buffer>", e))?;
            emit(&args.output, stdout, &String::from_utf8_lossy(&buf))
        }
        Command::Compare { files, output } => {
            let mut names = Vec::new();
            let mut dists = Vec::new();
            let mut reference: Option<Vec<String>> = None;
            for path in &files {
                let file = File::open(path).map_err(|e| Error::io(path, e))?;
                let (labels, values) = read_distribution_csv(BufReader::new(file))?;
                if let Some(r) = &reference {
                    if *r != labels {
                        return Err(Error::InvalidArgument(format!(
                            "{} lists different templates than {}",
                            path.display(),
                            files[0].display()
                        )));
                    }
                } else {
                    reference = Some(labels);
                }
                names.push(label(path).trim_end_matches(".csv").to_string());
                dists.push(values);
            }
            let matrix = compare_distributions(&dists)?;
            let mut buf = Vec::new();
            write_distance_csv(&mut buf, &names, &matrix).map_err(|e| Error::io("<buffer>", e))?;
            emit(&output, stdout, &String::from_utf8_lossy(&buf))
        }
        Command::Oracle(args) => {
            let g = load_graph_file(&args.graph)?;
            let templates = load_templates(&args.templates, args.root)?;
            let mut text = String::new();
            for (name, t) in &templates {
                let exact = exact_count(&g, t)?;
                eprintln!("{name}: {}", exact.value);
                text.push_str(&format!("{}\n", exact.value));
            }
            emit(&args.output, stdout, &text)
        }
        Command::Bench(args) => {
            let cfg = BenchConfig {
                num_vertices: args.n,
                avg_degree: args.avg_degree,
                batch_size: args.batch_size,
                num_partitions: args.partitions,
                repetitions: args.reps,
                seed: args.seed,
                precision: args.precision.into(),
            };
            let report = with_threads(args.threads, || run_bench(&cfg))??;
            eprintln!(
                "spmm  {:>10.3} ms  {:>8.3} GFLOP/s  {:>8.3} GB/s",
                report.spmm.seconds * 1e3,
                report.spmm.gflops,
                report.spmm.gbytes_per_sec
            );
            eprintln!(
                "spmv  {:>10.3} ms  {:>8.3} GFLOP/s  {:>8.3} GB/s  ({} columns)",
                report.spmv_reference.seconds * 1e3,
                report.spmv_reference.gflops,
                report.spmv_reference.gbytes_per_sec,
                args.batch_size
            );
            eprintln!(
                "ema   {:>10.3} ms  {:>8.3} GFLOP/s  {:>8.3} GB/s",
                report.ema.seconds * 1e3,
                report.ema.gflops,
                report.ema.gbytes_per_sec
            );
            emit(
                &args.output,
                stdout,
                &(serde_json::to_string_pretty(&report)? + "\n"),
            )
        }
        Command::GenTemplates { output } => {
            let written = write_templates(&output)?;
            eprintln!("wrote {} templates to {}", written.len(), output.display());
            Ok(())
        }
        Command::Summary { graph } => {
            let g = load_graph_file(&graph)?;
            emit(
                &None,
                stdout,
                &(serde_json::to_string(&g.summary())? + "\n"),
            )
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code: 0 on success, 2 on any error.
pub fn run<I, S>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let mut lock = BufWriter::new(stdout.lock());
    let code = run(std::env::args_os(), &mut lock);
    let _ = lock.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_strip_extensions() {
        assert_eq!(label(Path::new("dir/u5.txt")), "u5");
        assert_eq!(label(Path::new("g.txt.gz")), "g");
        assert_eq!(label(Path::new("plain")), "plain");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
