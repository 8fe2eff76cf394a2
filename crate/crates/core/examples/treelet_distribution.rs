// Treelet distributions of two random-graph models and their L1 distances.
//
// cargo run --release --example treelet_distribution

use treelet::template::all_free_trees;
use treelet::{compare_distributions, generate, treelet_distribution, EstimateConfig};

pub fn run_example() -> treelet::Result<Vec<Vec<f64>>> {
    let templates: Vec<_> = all_free_trees(6)
        .into_iter()
        .enumerate()
        .map(|(i, t)| (format!("tree{i}"), t))
        .collect();
    let cfg = EstimateConfig::default().with_iterations(100).with_seed(2);
    let graphs = [
        ("regular-a", generate::random_regular(400, 4, 1)?),
        ("regular-b", generate::random_regular(400, 4, 2)?),
        ("pref-att", generate::barabasi_albert(400, 2, 1)),
    ];
    let mut dists = Vec::new();
    for (name, g) in &graphs {
        let d = treelet_distribution(g, &templates, &cfg)?;
        let row: Vec<String> = d.frequencies.iter().map(|f| format!("{f:.3}")).collect();
        println!("{name:>10}  {}", row.join(" "));
        dists.push(d.frequencies);
    }
    let matrix = compare_distributions(&dists)?;
    for ((name, _), row) in graphs.iter().zip(&matrix) {
        let row: Vec<String> = row.iter().map(|d| format!("{d:.3}")).collect();
        println!("{name:>10}  {}", row.join(" "));
    }
    Ok(matrix)
}

#[allow(dead_code)]
fn main() -> treelet::Result<()> {
    run_example().map(|_| ())
}
