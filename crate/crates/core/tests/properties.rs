use proptest::prelude::*;

use treelet::combinadics::{build_split_table, ColorSetIndexer};
use treelet::{
    build_csc_split, dp_pass_naive, dp_pass_vectorized, ema_accumulate, estimate, exact_count,
    init_leaf_table, load_graph, partition_template, spmm_csc_split, spmv_reference,
    ColorAssignment, CountTable, CountingPlan, EstimateConfig, Graph, Precision, TemplateTree,
};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let edges = prop::collection::vec((0..n as u32, 0..n as u32), 0..n * 3);
        (Just(n), edges)
    })
}

/// Random labeled tree decoded from a Prüfer sequence.
fn tree_strategy(max_k: usize) -> impl Strategy<Value = TemplateTree> {
    (1..=max_k).prop_flat_map(|k| {
        let seq = prop::collection::vec(0..k, k.saturating_sub(2));
        (Just(k), seq, 0..k).prop_map(|(k, seq, root)| from_pruefer(k, &seq, root))
    })
}

fn from_pruefer(k: usize, seq: &[usize], root: usize) -> TemplateTree {
    if k == 1 {
        return TemplateTree::new(1, vec![], 0).unwrap();
    }
    let mut degree = vec![1; k];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::new();
    for &v in seq {
        let leaf = (0..k).find(|&u| degree[u] == 1).unwrap();
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..k).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    TemplateTree::new(k, edges, root).unwrap()
}

fn csr_pairs(g: &Graph) -> Vec<(u32, u32)> {
    (0..g.num_vertices())
        .flat_map(|u| g.neighbors(u).iter().map(move |&v| (u as u32, v)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip((n, edges) in graph_strategy(60)) {
        let g = Graph::from_edges(n, edges).unwrap();
        let mut text = Vec::new();
        g.write_edge_list(&mut text).unwrap();
        let back = load_graph(&text[..]).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn csc_split_flattens_to_csr((n, edges) in graph_strategy(80), parts in 1usize..100) {
        let g = Graph::from_edges(n, edges).unwrap();
        let a = build_csc_split(&g, parts.min(n)).unwrap();
        let mut flat: Vec<(u32, u32)> = Vec::new();
        for p in 0..a.num_partitions() {
            let rows = a.row_range(p);
            for e in a.partition(p) {
                prop_assert!(rows.contains(&(e.row as usize)));
                flat.push((e.row, e.col));
            }
        }
        flat.sort_unstable();
        prop_assert_eq!(flat, csr_pairs(&g));
    }

    #[test]
    fn csc_split_ignores_edge_order(
        (n, edges) in graph_strategy(60),
        parts in 1usize..20,
        rotate in 0usize..100,
    ) {
        let g = Graph::from_edges(n, edges.iter().copied()).unwrap();
        let mut shuffled: Vec<(u32, u32)> = edges.iter().map(|&(u, v)| (v, u)).collect();
        if !shuffled.is_empty() {
            let r = rotate % shuffled.len();
            shuffled.rotate_left(r);
        }
        shuffled.reverse();
        let h = Graph::from_edges(n, shuffled).unwrap();
        prop_assert_eq!(&g, &h);
        let p = parts.min(n);
        prop_assert_eq!(build_csc_split(&g, p).unwrap(), build_csc_split(&h, p).unwrap());
    }

    #[test]
    fn sub_template_sizes_add_up(t in tree_strategy(12)) {
        let chain = partition_template(&t);
        prop_assert_eq!(chain.len(), 2 * t.size() - 1);
        let mut leaves = 0;
        for sub in chain.iter() {
            match sub.children {
                None => leaves += sub.size(),
                Some((a, p)) => {
                    prop_assert_eq!(chain.get(a).size() + chain.get(p).size(), sub.size());
                    prop_assert_eq!(chain.get(a).root, sub.root);
                }
            }
        }
        prop_assert_eq!(leaves, t.size());
    }

    #[test]
    fn split_table_pair_counts(t in tree_strategy(12)) {
        let k = t.size();
        let chain = partition_template(&t);
        let idx = ColorSetIndexer::new(k).unwrap();
        let table = build_split_table(&chain, &idx);
        for (s, sub) in chain.iter().enumerate() {
            if let Some((a, _)) = sub.children {
                let list = table.get(s).unwrap();
                let want = idx.binomial(k, sub.size()) * idx.binomial(sub.size(), chain.get(a).size());
                prop_assert_eq!(list.total_pairs() as u64, want);
            } else {
                prop_assert!(table.get(s).is_none());
            }
        }
    }

    #[test]
    fn spmm_is_partition_independent(
        (n, edges) in graph_strategy(200),
        parts in 1usize..64,
        values in prop::collection::vec(-1.0f64..1.0, 200 * 5),
    ) {
        let g = Graph::from_edges(n, edges).unwrap();
        let cols: Vec<Vec<f64>> = (0..5).map(|c| values[c * 200..c * 200 + n].to_vec()).collect();
        let m = CountTable::from_columns(n, &cols).unwrap();
        let one = spmm_csc_split(&build_csc_split(&g, 1).unwrap(), &m, 0, 5).unwrap();
        let many = spmm_csc_split(&build_csc_split(&g, parts.min(n)).unwrap(), &m, 0, 5).unwrap();
        for (c, col) in cols.iter().enumerate() {
            let bits = |x: &[f64]| x.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(one.column(c)), bits(many.column(c)));
            let reference = spmv_reference(&g, col).unwrap();
            prop_assert_eq!(bits(one.column(c)), bits(&reference));
        }
    }

    #[test]
    fn spmm_matches_spmv_on_f32(
        n in 1usize..200,
        density in 0.0f64..0.2,
        seed in any::<u64>(),
        values in prop::collection::vec(-1.0f32..1.0, 200 * 3),
        parts in 1usize..16,
    ) {
        let g = treelet::generate::gnp(n, density, seed);
        let cols: Vec<Vec<f32>> = (0..3).map(|c| values[c * 200..c * 200 + n].to_vec()).collect();
        let m = CountTable::from_columns(n, &cols).unwrap();
        let out = spmm_csc_split(&build_csc_split(&g, parts.min(n)).unwrap(), &m, 0, 3).unwrap();
        for (c, col) in cols.iter().enumerate() {
            let reference = spmv_reference(&g, col).unwrap();
            for (x, y) in out.column(c).iter().zip(&reference) {
                prop_assert!((x - y).abs() <= 1e-6 * y.abs().max(1.0), "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn ema_matches_scalar_loop(
        a in prop::collection::vec(-10.0f32..10.0, 0..300),
        seed in any::<u32>(),
    ) {
        let n = a.len();
        let b: Vec<f32> = (0..n).map(|i| ((i as u32 ^ seed) % 17) as f32 - 8.0).collect();
        let mut dst: Vec<f32> = (0..n).map(|i| i as f32 * 0.5).collect();
        let mut want = dst.clone();
        for i in 0..n {
            want[i] += a[i] * b[i];
        }
        ema_accumulate(&mut dst, &a, &b).unwrap();
        prop_assert_eq!(dst, want);
    }

    #[test]
    fn two_stage_equals_naive(
        (n, edges) in graph_strategy(30),
        t in tree_strategy(6),
        seed in any::<u64>(),
        batch in 1usize..8,
        parts in 1usize..8,
    ) {
        let g = Graph::from_edges(n, edges).unwrap();
        let plan = CountingPlan::new(&t).unwrap();
        let coloring = treelet::random_coloring(n, t.size(), seed, 0);
        let a = build_csc_split(&g, parts.min(n)).unwrap();
        let naive = dp_pass_naive::<f64>(&g, &plan, &coloring).unwrap();
        let vect = dp_pass_vectorized::<f64>(&g, &a, &plan, &coloring, batch).unwrap();
        prop_assert_eq!(naive.top.as_slice(), vect.top.as_slice());
        prop_assert_eq!(naive.colorful_sum, vect.colorful_sum);
    }

    #[test]
    fn leaf_tables_are_one_hot(colors in prop::collection::vec(0u8..7, 1..100)) {
        let coloring = ColorAssignment::new(colors.clone(), 7).unwrap();
        let leaf = init_leaf_table::<f32>(&coloring);
        for (i, &c) in colors.iter().enumerate() {
            for col in 0..7 {
                let want = if col == c as usize { 1.0 } else { 0.0 };
                prop_assert_eq!(leaf.get(i, col), want);
            }
        }
    }

    #[test]
    fn oracle_maps_divisible_by_alpha((n, edges) in graph_strategy(14), t in tree_strategy(6)) {
        let g = Graph::from_edges(n, edges).unwrap();
        let exact = exact_count(&g, &t).unwrap();
        let alpha = treelet::automorphism_count(&t) as u64;
        prop_assert_eq!(exact.injective_maps, exact.value * alpha);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn estimate_is_deterministic(
        (n, edges) in graph_strategy(120),
        t in tree_strategy(7),
        seed in any::<u64>(),
        f64_mode in any::<bool>(),
    ) {
        let g = Graph::from_edges(n, edges).unwrap();
        let precision = if f64_mode { Precision::F64 } else { Precision::F32 };
        let cfg = EstimateConfig::default()
            .with_iterations(6)
            .with_seed(seed)
            .with_precision(precision);
        let a = estimate(&g, &t, &cfg).unwrap();
        let b = estimate(&g, &t, &cfg).unwrap();
        let c = estimate(&g, &t, &EstimateConfig { num_partitions: Some(1), ..cfg.clone() }).unwrap();
        prop_assert_eq!(&a.per_iteration, &b.per_iteration);
        prop_assert_eq!(&a.per_iteration, &c.per_iteration);
    }
}
