// Exact embedding counts of every 5-vertex tree in a small random graph.
//
// cargo run --release --example exact_oracle

use treelet::template::all_free_trees;
use treelet::{exact_count, generate};

pub fn run_example() -> treelet::Result<Vec<u64>> {
    let g = generate::gnp(40, 0.15, 5);
    println!("n = {}, m = {}", g.num_vertices(), g.num_edges());
    let mut counts = Vec::new();
    for t in all_free_trees(5) {
        let exact = exact_count(&g, &t)?;
        println!(
            "{:<28} {:>8} copies  ({} injective maps)",
            t.canonical_form(),
            exact.value,
            exact.injective_maps
        );
        counts.push(exact.value);
    }
    Ok(counts)
}

#[allow(dead_code)]
fn main() -> treelet::Result<()> {
    run_example().map(|_| ())
}
