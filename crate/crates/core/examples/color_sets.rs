// Color-set ranking and the (active, passive) split list the counting
// recurrence walks for one color set.
//
// cargo run --release --example color_sets

use treelet::combinadics::{build_split_table, ColorSetIndexer};
use treelet::partition_template;
use treelet::template::star_template;

pub fn run_example() -> treelet::Result<usize> {
    let idx = ColorSetIndexer::new(5)?;
    for t in 0..=5 {
        println!("size {t}: {} sets", idx.num_sets(t));
    }
    for r in 0..idx.num_sets(3) {
        let set = idx.unrank(r, 3)?;
        assert_eq!(idx.rank(&set)?, r);
        println!("  rank {r:>2} <-> {set:?}");
    }

    // The full star on 5 vertices splits into a 4-vertex star (active, keeps
    // the center) and a single leaf (passive).
    let chain = partition_template(&star_template(5));
    let table = build_split_table(&chain, &idx);
    let list = table.get(0).expect("top sub-template has children");
    let set = idx.rank(&[0, 1, 2, 3, 4])?;
    println!(
        "splits of {{0..4}} into {} active + {} passive colors:",
        list.active_size,
        list.set_size - list.active_size
    );
    for &(a, p) in list.splits(set) {
        println!(
            "  active {:?} passive {:?}",
            idx.unrank(a as usize, list.active_size)?,
            idx.unrank(p as usize, list.set_size - list.active_size)?
        );
    }
    Ok(list.splits(set).len())
}

#[allow(dead_code)]
fn main() -> treelet::Result<()> {
    run_example().map(|_| ())
}
