// Print the recursive active/passive split of a template and the column
// passes it costs per iteration.
//
// cargo run --release --example template_chain

use treelet::combinadics::ColorSetIndexer;
use treelet::template::all_free_trees;
use treelet::{automorphism_count, partition_template};

pub fn run_example() -> treelet::Result<usize> {
    let t = all_free_trees(7).swap_remove(6);
    let k = t.size();
    println!("template edges {:?}, root {}", t.edges(), t.root());
    println!("automorphisms: {}", automorphism_count(&t));
    let chain = partition_template(&t);
    let idx = ColorSetIndexer::new(k)?;
    for s in chain.evaluation_order() {
        let sub = chain.get(s);
        match sub.children {
            None => println!("  T{s:<2} leaf {:?}", sub.vertices),
            Some((a, p)) => println!(
                "  T{s:<2} {:?} = active T{a} + passive T{p}; {} columns, {} passes",
                sub.vertices,
                idx.num_sets(sub.size()),
                idx.num_sets(chain.get(p).size())
            ),
        }
    }
    Ok(chain.len())
}

#[allow(dead_code)]
fn main() -> treelet::Result<()> {
    run_example().map(|_| ())
}
