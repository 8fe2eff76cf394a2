//! Every cargo example runs to completion and produces sensible output.

mod count_treelets {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/count_treelets.rs"
    ));
}
mod kernels_spmm {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/kernels_spmm.rs"
    ));
}
mod template_chain {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/template_chain.rs"
    ));
}
mod exact_oracle {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/exact_oracle.rs"
    ));
}
mod treelet_distribution {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/treelet_distribution.rs"
    ));
}
mod color_sets {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/color_sets.rs"
    ));
}

#[test]
fn count_treelets_close_to_exact() {
    for (name, est, exact) in count_treelets::run_example().unwrap() {
        let rel = (est - exact as f64).abs() / exact as f64;
        assert!(rel < 0.1, "{name}: {est} vs {exact}");
    }
}

#[test]
fn kernels_spmm_runs() {
    assert!(kernels_spmm::run_example().unwrap() > 0.0);
}

#[test]
fn template_chain_has_2k_minus_1_parts() {
    assert_eq!(template_chain::run_example().unwrap(), 13);
}

#[test]
fn exact_oracle_lists_three_trees() {
    assert_eq!(exact_oracle::run_example().unwrap().len(), 3);
}

#[test]
fn distribution_matrix_is_symmetric() {
    let m = treelet_distribution::run_example().unwrap();
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row[i], 0.0);
        for (j, &d) in row.iter().enumerate() {
            assert_eq!(d, m[j][i]);
        }
    }
    assert!(m[0][2] > m[0][1]);
}

#[test]
fn color_sets_split_count() {
    assert_eq!(color_sets::run_example().unwrap(), 5);
}
