// Estimate path and star counts on a preferential-attachment graph and
// compare against the exact backtracking count.
//
// cargo run --release --example count_treelets

use treelet::template::{path_template, star_template};
use treelet::{estimate, exact_count, generate, EstimateConfig, Precision};

pub fn run_example() -> treelet::Result<Vec<(String, f64, u64)>> {
    let g = generate::barabasi_albert(300, 3, 7);
    let cfg = EstimateConfig::default()
        .with_iterations(400)
        .with_seed(11)
        .with_precision(Precision::F64);
    let mut rows = Vec::new();
    for (name, t) in [
        ("u3", path_template(3)),
        ("u4", path_template(4)),
        ("star4", star_template(4)),
    ] {
        let est = estimate(&g, &t, &cfg)?;
        let exact = exact_count(&g, &t)?.value;
        println!(
            "{name:>6}  estimate {:>12.1} +- {:>8.1}  exact {exact:>10}",
            est.mean, est.std_error
        );
        rows.push((name.to_string(), est.mean, exact));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> treelet::Result<()> {
    run_example().map(|_| ())
}
