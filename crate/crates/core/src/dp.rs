//! One color-coding iteration: random coloring, leaf tables, and the
//! bottom-up sweep over the sub-template chain.
//!
//! Two sweeps are provided. [`dp_pass_naive`] is the vertex-centric
//! recurrence that walks the neighbor list of every vertex once per
//! (color set, split) pair; it is kept as the reference. [`dp_pass_vectorized`]
//! factors the neighbor sum out of the split loop: for a parent `s` with
//! active child `a` and passive child `p`,
//!
//! ```text
//! sum_j M_a(i, Ia) * M_p(j, Ip)  ==  M_a(i, Ia) * sum_j M_p(j, Ip)
//! ```
//!
//! so neighbor sums are computed once per passive column (a batched SpMM,
//! written back over `M_p`) and the update becomes element-wise
//! multiply-adds over whole columns.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combinadics::{build_split_table, ColorSetIndexer, SplitTable};
use crate::error::{Error, Result};
use crate::graph::{CscSplitMatrix, Graph};
use crate::kernels::{
    ema_accumulate, spmm_csc_split_into, CountTable, CountValue, SpmmScratch, PAR_THRESHOLD,
};
use crate::template::{
    automorphism_count, colorful_probability, partition_template, SubTemplateChain, TemplateTree,
    MAX_TEMPLATE_SIZE,
};

/// One color in `[0, k)` per graph vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    num_colors: usize,
    colors: Vec<u8>,
}

impl ColorAssignment {
    pub fn new(colors: Vec<u8>, num_colors: usize) -> Result<Self> {
        if num_colors == 0 || num_colors > MAX_TEMPLATE_SIZE {
            return Err(Error::InvalidArgument(format!(
                "number of colors must be in [1, {MAX_TEMPLATE_SIZE}], got {num_colors}"
            )));
        }
        if let Some(c) = colors.iter().find(|&&c| c as usize >= num_colors) {
            return Err(Error::InvalidArgument(format!(
                "color {c} out of range for {num_colors} colors"
            )));
        }
        Ok(ColorAssignment { num_colors, colors })
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// Colors `n` vertices uniformly from `[0, k)`. The stream is ChaCha8 keyed
/// by `seed` with `iteration` as the stream id, so a given iteration's
/// coloring does not depend on how many iterations ran before it.
pub fn random_coloring(n: usize, k: usize, seed: u64, iteration: u64) -> ColorAssignment {
    assert!((1..=MAX_TEMPLATE_SIZE).contains(&k));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    let colors = (0..n).map(|_| rng.gen_range(0..k as u8)).collect();
    ColorAssignment {
        num_colors: k,
        colors,
    }
}

/// `n x k` one-hot table: row `i` has a single 1 in column `color(i)`.
pub fn init_leaf_table<T: CountValue>(coloring: &ColorAssignment) -> CountTable<T> {
    let mut table = CountTable::zeros(coloring.len(), coloring.num_colors());
    fill_leaf(&mut table, coloring);
    table
}

fn fill_leaf<T: CountValue>(table: &mut CountTable<T>, coloring: &ColorAssignment) {
    // Singleton color sets rank to the color itself.
    for (i, &c) in coloring.colors().iter().enumerate() {
        table.set(i, c as usize, T::ONE);
    }
}

/// Everything about a template that is fixed across iterations.
#[derive(Debug, Clone)]
pub struct CountingPlan {
    template: TemplateTree,
    chain: SubTemplateChain,
    indexer: ColorSetIndexer,
    splits: SplitTable,
    probability: f64,
    automorphisms: u128,
}

impl CountingPlan {
    pub fn new(template: &TemplateTree) -> Result<Self> {
        let k = template.size();
        let indexer = ColorSetIndexer::new(k)?;
        let chain = partition_template(template);
        let splits = build_split_table(&chain, &indexer);
        Ok(CountingPlan {
            template: template.clone(),
            chain,
            indexer,
            splits,
            probability: colorful_probability(k),
            automorphisms: automorphism_count(template),
        })
    }

    pub fn template(&self) -> &TemplateTree {
        &self.template
    }

    pub fn chain(&self) -> &SubTemplateChain {
        &self.chain
    }

    pub fn indexer(&self) -> &ColorSetIndexer {
        &self.indexer
    }

    pub fn splits(&self) -> &SplitTable {
        &self.splits
    }

    /// Number of colors, equal to the template size.
    pub fn num_colors(&self) -> usize {
        self.template.size()
    }

    pub fn colorful_probability(&self) -> f64 {
        self.probability
    }

    pub fn automorphisms(&self) -> u128 {
        self.automorphisms
    }

    /// `P * alpha`, the divisor turning a colorful sum into an estimate.
    pub fn normalization(&self) -> f64 {
        self.probability * self.automorphisms as f64
    }

    fn num_cols(&self, s: usize) -> usize {
        self.indexer.num_sets(self.chain.get(s).size())
    }

    /// Bytes held by the count-table pool of one iteration on an `n`-vertex
    /// graph: for each table width, the most tables of that width alive at
    /// once during the sweep.
    pub fn table_bytes(&self, n: usize, value_size: usize) -> u64 {
        let mut live: HashMap<usize, u64> = HashMap::new();
        let mut peak: HashMap<usize, u64> = HashMap::new();
        let mut alloc = |cols: usize, live: &mut HashMap<usize, u64>| {
            let l = live.entry(cols).or_default();
            *l += 1;
            let p = peak.entry(cols).or_default();
            *p = (*p).max(*l);
        };
        for s in self.chain.evaluation_order() {
            alloc(self.num_cols(s), &mut live);
            if let Some((a, p)) = self.chain.get(s).children {
                for c in [a, p] {
                    *live.get_mut(&self.num_cols(c)).expect("child allocated") -= 1;
                }
            }
        }
        peak.iter()
            .map(|(&cols, &count)| count * cols as u64 * n as u64 * value_size as u64)
            .sum()
    }
}

/// Neighbor-sum column computations per vertex, indexed by sub-template.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraversalStats {
    pub per_sub_template: Vec<u64>,
}

impl TraversalStats {
    pub fn total(&self) -> u64 {
        self.per_sub_template.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct IterationResult<T> {
    /// Count table of the full template.
    pub top: CountTable<T>,
    /// Sum of every entry of `top`, accumulated in `f64`.
    pub colorful_sum: f64,
    /// `colorful_sum / (P * alpha)`.
    pub final_count: f64,
    pub stats: TraversalStats,
}

/// Column sums in parallel, combined in column order: the result does not
/// depend on the worker count.
fn table_sum<T: CountValue>(table: &CountTable<T>) -> f64 {
    let col_sum = |c: usize| table.column(c).iter().map(|v| v.to_f64()).sum::<f64>();
    let sums: Vec<f64> = if table.num_rows() * table.num_cols() < 1 << 16 {
        (0..table.num_cols()).map(col_sum).collect()
    } else {
        (0..table.num_cols()).into_par_iter().map(col_sum).collect()
    };
    sums.into_iter().sum()
}

fn check_coloring(g: &Graph, plan: &CountingPlan, coloring: &ColorAssignment) -> Result<()> {
    if coloring.len() != g.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: g.num_vertices(),
            actual: coloring.len(),
        });
    }
    if coloring.num_colors() != plan.num_colors() {
        return Err(Error::InvalidArgument(format!(
            "coloring uses {} colors but the template has {} vertices",
            coloring.num_colors(),
            plan.num_colors()
        )));
    }
    Ok(())
}

/// Reference sweep: every vertex walks its neighbor list once per color set
/// and split of every non-leaf sub-template.
pub fn dp_pass_naive<T: CountValue>(
    g: &Graph,
    plan: &CountingPlan,
    coloring: &ColorAssignment,
) -> Result<IterationResult<T>> {
    check_coloring(g, plan, coloring)?;
    let n = g.num_vertices();
    let chain = plan.chain();
    let mut tables: Vec<Option<CountTable<T>>> = vec![None; chain.len()];
    let mut traversals = vec![0u64; chain.len()];

    for s in chain.evaluation_order() {
        let sub = chain.get(s);
        let Some((a, p)) = sub.children else {
            tables[s] = Some(init_leaf_table(coloring));
            continue;
        };
        let splits = plan.splits().get(s).expect("non-leaf has splits");
        let active = tables[a].take().expect("active child evaluated");
        let passive = tables[p].take().expect("passive child evaluated");
        let mut table = CountTable::zeros(n, plan.num_cols(s));
        for i in 0..n {
            for set in 0..table.num_cols() {
                let mut total = T::ZERO;
                for &(ia, ip) in splits.splits(set) {
                    let here = active.get(i, ia as usize);
                    traversals[s] += 1;
                    for &j in g.neighbors(i) {
                        total += here * passive.get(j as usize, ip as usize);
                    }
                }
                table.set(i, set, total);
            }
        }
        tables[s] = Some(table);
    }

    let top = tables[0].take().expect("top table evaluated");
    let colorful_sum = table_sum(&top);
    let per_sub_template = traversals
        .into_iter()
        .map(|t| if n == 0 { 0 } else { t / n as u64 })
        .collect();
    Ok(IterationResult {
        top,
        colorful_sum,
        final_count: colorful_sum / plan.normalization(),
        stats: TraversalStats { per_sub_template },
    })
}

/// Buffers reused across iterations, keyed by table width.
#[derive(Debug, Default)]
pub struct DpWorkspace<T> {
    free: HashMap<usize, Vec<Vec<T>>>,
    scratch: SpmmScratch<T>,
}

impl<T: CountValue> DpWorkspace<T> {
    pub fn new() -> Self {
        DpWorkspace {
            free: HashMap::new(),
            scratch: SpmmScratch::new(),
        }
    }

    fn take(&mut self, n: usize, cols: usize) -> CountTable<T> {
        let buf = self
            .free
            .get_mut(&cols)
            .and_then(Vec::pop)
            .unwrap_or_default();
        CountTable::from_buffer(buf, n, cols)
    }

    /// Returns a table's storage to the pool.
    pub fn recycle(&mut self, table: CountTable<T>) {
        let cols = table.num_cols();
        self.free.entry(cols).or_default().push(table.into_buffer());
    }
}

/// Two-stage sweep built on the SpMM and eMA kernels.
pub fn dp_pass_vectorized<T: CountValue>(
    g: &Graph,
    a: &CscSplitMatrix,
    plan: &CountingPlan,
    coloring: &ColorAssignment,
    batch_size: usize,
) -> Result<IterationResult<T>> {
    dp_pass_vectorized_with(g, a, plan, coloring, batch_size, &mut DpWorkspace::new())
}

pub fn dp_pass_vectorized_with<T: CountValue>(
    g: &Graph,
    a: &CscSplitMatrix,
    plan: &CountingPlan,
    coloring: &ColorAssignment,
    batch_size: usize,
    ws: &mut DpWorkspace<T>,
) -> Result<IterationResult<T>> {
    check_coloring(g, plan, coloring)?;
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let n = g.num_vertices();
    if a.num_rows() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: a.num_rows(),
        });
    }
    let chain = plan.chain();
    let mut tables: Vec<Option<CountTable<T>>> = vec![None; chain.len()];
    let mut column_passes = vec![0u64; chain.len()];

    for s in chain.evaluation_order() {
        let sub = chain.get(s);
        let Some((ai, pi)) = sub.children else {
            let mut leaf = ws.take(n, plan.num_colors());
            fill_leaf(&mut leaf, coloring);
            tables[s] = Some(leaf);
            continue;
        };
        let active = tables[ai].take().expect("active child evaluated");
        let mut passive = tables[pi].take().expect("passive child evaluated");

        // Stage 1: neighbor sums of every passive column, written back in place.
        let passive_cols = passive.num_cols();
        let mut start = 0;
        while start < passive_cols {
            let width = batch_size.min(passive_cols - start);
            spmm_csc_split_into(a, &passive, start, width, &mut ws.scratch)?;
            let sums = ws.scratch.result();
            let write_back = |(j, col): (usize, &mut [T])| {
                for (i, v) in col.iter_mut().enumerate() {
                    *v = sums[i * width + j];
                }
            };
            let block = passive.columns_mut(start, width);
            if n * width < PAR_THRESHOLD {
                block.chunks_mut(n.max(1)).enumerate().for_each(write_back);
            } else {
                block.par_chunks_mut(n).enumerate().for_each(write_back);
            }
            column_passes[s] += width as u64;
            start += width;
        }

        // Stage 2: element-wise multiply-add over the split table.
        let splits = plan.splits().get(s).expect("non-leaf has splits");
        let mut table = ws.take(n, plan.num_cols(s));
        for set in 0..table.num_cols() {
            let dst = table.column_mut(set);
            for &(ia, ip) in splits.splits(set) {
                ema_accumulate(dst, active.column(ia as usize), passive.column(ip as usize))?;
            }
        }
        ws.recycle(active);
        ws.recycle(passive);
        tables[s] = Some(table);
    }

    let top = tables[0].take().expect("top table evaluated");
    let colorful_sum = table_sum(&top);
    Ok(IterationResult {
        top,
        colorful_sum,
        final_count: colorful_sum / plan.normalization(),
        stats: TraversalStats {
            per_sub_template: column_passes,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::graph::build_csc_split;
    use crate::template::{path_template, star_template};

    fn colors(c: &[u8], k: usize) -> ColorAssignment {
        ColorAssignment::new(c.to_vec(), k).unwrap()
    }

    #[test]
    fn coloring_is_deterministic() {
        let a = random_coloring(1000, 5, 42, 3);
        let b = random_coloring(1000, 5, 42, 3);
        assert_eq!(a, b);
        assert_ne!(a, random_coloring(1000, 5, 42, 4));
        assert_ne!(a, random_coloring(1000, 5, 43, 3));
        assert!(random_coloring(50, 1, 9, 0)
            .colors()
            .iter()
            .all(|&c| c == 0));
    }

    #[test]
    fn coloring_frequencies_are_binomial() {
        let (n, k) = (100_000usize, 5usize);
        let c = random_coloring(n, k, 2024, 0);
        let mut freq = [0usize; 5];
        for &x in c.colors() {
            freq[x as usize] += 1;
        }
        let mean = n as f64 / k as f64;
        let sigma = (n as f64 * (1.0 / k as f64) * (1.0 - 1.0 / k as f64)).sqrt();
        for f in freq {
            assert!((f as f64 - mean).abs() <= 5.0 * sigma, "{freq:?}");
        }
    }

    #[test]
    fn coloring_validation() {
        assert!(ColorAssignment::new(vec![0, 2], 2).is_err());
        assert!(ColorAssignment::new(vec![0], 0).is_err());
    }

    #[test]
    fn leaf_table_examples() {
        let t: CountTable<f64> = init_leaf_table(&colors(&[0, 1, 0], 2));
        assert_eq!(t.column(0), &[1.0, 0.0, 1.0]);
        assert_eq!(t.column(1), &[0.0, 1.0, 0.0]);
        let single: CountTable<f32> = init_leaf_table(&colors(&[0, 0, 0, 0], 1));
        assert_eq!(single.column(0), &[1.0; 4]);
    }

    #[test]
    fn edge_on_triangle() {
        let g = generate::complete(3);
        let a = build_csc_split(&g, 1).unwrap();
        let plan = CountingPlan::new(&path_template(2)).unwrap();
        let c = colors(&[0, 1, 0], 2);
        let naive = dp_pass_naive::<f64>(&g, &plan, &c).unwrap();
        assert_eq!(naive.colorful_sum, 4.0);
        assert_eq!(naive.final_count, 4.0);
        let vec = dp_pass_vectorized::<f64>(&g, &a, &plan, &c, 16).unwrap();
        assert_eq!(vec.colorful_sum, 4.0);
        assert_eq!(vec.final_count, 4.0);
    }

    #[test]
    fn monochrome_coloring_counts_nothing() {
        let g = generate::complete(4);
        let a = build_csc_split(&g, 2).unwrap();
        let plan = CountingPlan::new(&path_template(3)).unwrap();
        let c = colors(&[1, 1, 1, 1], 3);
        assert_eq!(
            dp_pass_naive::<f64>(&g, &plan, &c).unwrap().final_count,
            0.0
        );
        assert_eq!(
            dp_pass_vectorized::<f64>(&g, &a, &plan, &c, 4)
                .unwrap()
                .final_count,
            0.0
        );
    }

    #[test]
    fn single_vertex_template_counts_vertices() {
        let g = generate::gnp(17, 0.3, 1);
        let a = build_csc_split(&g, 4).unwrap();
        let plan = CountingPlan::new(&path_template(1)).unwrap();
        let c = random_coloring(17, 1, 0, 0);
        let naive = dp_pass_naive::<f64>(&g, &plan, &c).unwrap();
        assert_eq!(naive.final_count, 17.0);
        let vec = dp_pass_vectorized::<f32>(&g, &a, &plan, &c, 16).unwrap();
        assert_eq!(vec.colorful_sum, 17.0);
        assert_eq!(vec.stats.total(), 0);
    }

    #[test]
    fn path3_on_triangle_all_colorings() {
        let g = generate::complete(3);
        let a = build_csc_split(&g, 3).unwrap();
        for root in 0..3 {
            let plan = CountingPlan::new(&path_template(3).with_root(root).unwrap()).unwrap();
            for code in 0..27u32 {
                let c: Vec<u8> = (0..3).map(|i| (code / 3u32.pow(i) % 3) as u8).collect();
                let c = colors(&c, 3);
                let naive = dp_pass_naive::<f64>(&g, &plan, &c).unwrap();
                let vec = dp_pass_vectorized::<f64>(&g, &a, &plan, &c, 2).unwrap();
                assert_eq!(naive.top, vec.top);
                assert_eq!(naive.final_count, vec.final_count);
            }
        }
    }

    #[test]
    fn batch_size_does_not_change_results() {
        let g = generate::gnp(40, 0.15, 8);
        let a = build_csc_split(&g, 5).unwrap();
        let plan = CountingPlan::new(&star_template(5)).unwrap();
        let c = random_coloring(40, 5, 1, 1);
        let reference = dp_pass_vectorized::<f32>(&g, &a, &plan, &c, 1).unwrap();
        for batch in [2, 3, 7, 16, 64] {
            let other = dp_pass_vectorized::<f32>(&g, &a, &plan, &c, batch).unwrap();
            assert_eq!(reference.top, other.top, "batch {batch}");
        }
    }

    #[test]
    fn workspace_reuse_is_clean() {
        let g = generate::gnp(30, 0.2, 4);
        let a = build_csc_split(&g, 3).unwrap();
        let plan = CountingPlan::new(&path_template(4)).unwrap();
        let mut ws = DpWorkspace::new();
        for it in 0..5 {
            let c = random_coloring(30, 4, 11, it);
            let fresh = dp_pass_vectorized::<f64>(&g, &a, &plan, &c, 3).unwrap();
            let reused = dp_pass_vectorized_with::<f64>(&g, &a, &plan, &c, 3, &mut ws).unwrap();
            assert_eq!(fresh.top, reused.top);
            ws.recycle(reused.top);
        }
    }

    #[test]
    fn leaf_tables_are_one_hot() {
        let c = random_coloring(500, 6, 5, 0);
        let t: CountTable<f64> = init_leaf_table(&c);
        for i in 0..500 {
            let row: Vec<f64> = (0..6).map(|j| t.get(i, j)).collect();
            assert_eq!(row.iter().sum::<f64>(), 1.0);
            assert_eq!(row[c.colors()[i] as usize], 1.0);
        }
    }

    #[test]
    fn table_bytes_counts_pool_footprint() {
        // Edge template: two leaves (k = 2 columns) then the top (1 column).
        let plan = CountingPlan::new(&path_template(2)).unwrap();
        assert_eq!(plan.table_bytes(10, 4), (2 * 2 + 1) * 10 * 4);
    }
}
