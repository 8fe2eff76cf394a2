// The two dense kernels on their own: batched neighbor sums over the
// row-partitioned adjacency, then an element-wise multiply-add.
//
// cargo run --release --example kernels_spmm

use treelet::{
    build_csc_split, ema_accumulate, generate, spmm_csc_split, spmv_reference, CountTable,
};

pub fn run_example() -> treelet::Result<f64> {
    let g = generate::gnp(2000, 0.004, 3);
    let a = build_csc_split(&g, 16)?;
    println!(
        "n = {}, nnz = {}, {} partitions of {} rows",
        a.num_rows(),
        a.num_entries(),
        a.num_partitions(),
        a.block_rows()
    );

    let columns: Vec<Vec<f32>> = (0..8)
        .map(|c| (0..2000).map(|i| ((i * 7 + c) % 5) as f32).collect())
        .collect();
    let m = CountTable::from_columns(2000, &columns)?;
    let sums = spmm_csc_split(&a, &m, 0, 8)?;
    for (c, col) in columns.iter().enumerate() {
        assert_eq!(sums.column(c), spmv_reference(&g, col)?.as_slice());
    }
    println!("8 neighbor-sum columns match the CSR reference");

    let mut dst = vec![0.0f32; 2000];
    ema_accumulate(&mut dst, m.column(0), sums.column(1))?;
    let total: f64 = dst.iter().map(|&v| v as f64).sum();
    println!("sum of x0 * (A x1) = {total}");
    Ok(total)
}

#[allow(dead_code)]
fn main() -> treelet::Result<()> {
    run_example().map(|_| ())
}
