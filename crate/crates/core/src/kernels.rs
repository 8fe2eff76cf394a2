//! The two compute primitives of the vectorized DP: a batched sparse x dense
//! product over CSC-Split (neighbor sums) and an element-wise multiply-add
//! over dense columns. `spmv_reference` is the plain CSR traversal both are
//! checked against.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CscSplitMatrix, Graph};

/// Below this many output values a kernel runs on the calling thread.
pub(crate) const PAR_THRESHOLD: usize = 1 << 14;

/// Scalar stored in count tables.
pub trait CountValue:
    Copy
    + Send
    + Sync
    + Default
    + PartialEq
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + 'static
{
    const ZERO: Self;
    const ONE: Self;
    const NAME: &'static str;
    fn to_f64(self) -> f64;
    fn from_f64(x: f64) -> Self;
}

impl CountValue for f32 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const NAME: &'static str = "f32";
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
}

impl CountValue for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const NAME: &'static str = "f64";
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
}

/// Dense `num_rows x num_cols` matrix stored column by column. Entry
/// `(i, c)` counts colorful embeddings of a sub-template rooted at vertex
/// `i` that use the color set with column index `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable<T> {
    num_rows: usize,
    num_cols: usize,
    data: Vec<T>,
}

impl<T: CountValue> CountTable<T> {
    pub fn zeros(num_rows: usize, num_cols: usize) -> Self {
        CountTable {
            num_rows,
            num_cols,
            data: vec![T::ZERO; num_rows * num_cols],
        }
    }

    /// Reuses `buf` as backing storage, zero-filled.
    pub(crate) fn from_buffer(mut buf: Vec<T>, num_rows: usize, num_cols: usize) -> Self {
        buf.clear();
        buf.resize(num_rows * num_cols, T::ZERO);
        CountTable {
            num_rows,
            num_cols,
            data: buf,
        }
    }

    /// Builds a table from explicit columns.
    pub fn from_columns(num_rows: usize, columns: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(num_rows * columns.len());
        for col in columns {
            if col.len() != num_rows {
                return Err(Error::LengthMismatch {
                    expected: num_rows,
                    actual: col.len(),
                });
            }
            data.extend_from_slice(col);
        }
        Ok(CountTable {
            num_rows,
            num_cols: columns.len(),
            data,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[col * self.num_rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[col * self.num_rows + row] = value;
    }

    #[inline]
    pub fn column(&self, col: usize) -> &[T] {
        &self.data[col * self.num_rows..(col + 1) * self.num_rows]
    }

    #[inline]
    pub fn column_mut(&mut self, col: usize) -> &mut [T] {
        &mut self.data[col * self.num_rows..(col + 1) * self.num_rows]
    }

    /// `count` consecutive columns starting at `start`, as one slice.
    pub(crate) fn columns_mut(&mut self, start: usize, count: usize) -> &mut [T] {
        &mut self.data[start * self.num_rows..(start + count) * self.num_rows]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub(crate) fn into_buffer(self) -> Vec<T> {
        self.data
    }

    pub fn size_bytes(&self) -> usize {
        self.data.len() * std::mem::size_of::<T>()
    }
}

/// `n x batch` block of neighbor sums, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSumBuffer<T> {
    num_rows: usize,
    batch: usize,
    data: Vec<T>,
}

impl<T: CountValue> NeighborSumBuffer<T> {
    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.num_rows..(j + 1) * self.num_rows]
    }
}

/// Row-by-row CSR neighbor sum: `out[i] = sum of x[j] over j in N(i)`.
pub fn spmv_reference<T: CountValue>(g: &Graph, x: &[T]) -> Result<Vec<T>> {
    let n = g.num_vertices();
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    let row = |i: usize| {
        let mut acc = T::ZERO;
        for &j in g.neighbors(i) {
            acc += x[j as usize];
        }
        acc
    };
    let mut out = vec![T::ZERO; n];
    if n < PAR_THRESHOLD {
        out.iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
    } else {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(1024)
            .for_each(|(i, o)| *o = row(i));
    }
    Ok(out)
}

/// Reusable staging memory for [`spmm_csc_split`].
#[derive(Debug, Default)]
pub struct SpmmScratch<T> {
    staged: Vec<T>,
    acc: Vec<T>,
}

impl<T: CountValue> SpmmScratch<T> {
    pub fn new() -> Self {
        SpmmScratch {
            staged: Vec::new(),
            acc: Vec::new(),
        }
    }

    /// Row-major `n x batch` result of the last product.
    pub(crate) fn result(&self) -> &[T] {
        &self.acc
    }
}

fn check_batch<T: CountValue>(
    a: &CscSplitMatrix,
    m: &CountTable<T>,
    col_start: usize,
    batch: usize,
) -> Result<()> {
    if m.num_rows() != a.num_rows() {
        return Err(Error::LengthMismatch {
            expected: a.num_rows(),
            actual: m.num_rows(),
        });
    }
    if batch == 0 || col_start + batch > m.num_cols() {
        return Err(Error::InvalidArgument(format!(
            "batch [{col_start}, {}) out of range for {} columns",
            col_start + batch,
            m.num_cols()
        )));
    }
    Ok(())
}

/// Computes `A * M[:, col_start..col_start + batch]` into `scratch`, leaving
/// the result row-major in `scratch.result()`.
///
/// The batch columns are first staged row-major so that every nonzero adds
/// `batch` contiguous values. Each partition owns a contiguous block of
/// output rows and walks its entries in stored `(col, row)` order, so any
/// single output row accumulates its neighbors in ascending column order no
/// matter how many partitions there are.
pub(crate) fn spmm_csc_split_into<T: CountValue>(
    a: &CscSplitMatrix,
    m: &CountTable<T>,
    col_start: usize,
    batch: usize,
    scratch: &mut SpmmScratch<T>,
) -> Result<()> {
    check_batch(a, m, col_start, batch)?;
    let n = a.num_rows();
    let width = n * batch;
    scratch.staged.clear();
    scratch.staged.resize(width, T::ZERO);
    scratch.acc.clear();
    scratch.acc.resize(width, T::ZERO);
    if n == 0 {
        return Ok(());
    }

    let stage_row = |(i, dst): (usize, &mut [T])| {
        for (j, d) in dst.iter_mut().enumerate() {
            *d = m.get(i, col_start + j);
        }
    };
    if width < PAR_THRESHOLD {
        scratch
            .staged
            .chunks_mut(batch)
            .enumerate()
            .for_each(stage_row);
    } else {
        scratch
            .staged
            .par_chunks_mut(batch)
            .enumerate()
            .with_min_len(256)
            .for_each(stage_row);
    }

    let staged = &scratch.staged;
    let block = a.block_rows();
    let run_partition = |(p, out): (usize, &mut [T])| {
        let lo = p * block;
        for e in a.partition(p) {
            let r = e.row as usize - lo;
            let c = e.col as usize;
            let dst = &mut out[r * batch..(r + 1) * batch];
            let src = &staged[c * batch..(c + 1) * batch];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
    };
    if width < PAR_THRESHOLD {
        scratch
            .acc
            .chunks_mut(block * batch)
            .enumerate()
            .for_each(run_partition);
    } else {
        scratch
            .acc
            .par_chunks_mut(block * batch)
            .enumerate()
            .for_each(run_partition);
    }
    Ok(())
}

/// Neighbor sums of `batch` consecutive columns of `m` starting at `col_start`.
pub fn spmm_csc_split<T: CountValue>(
    a: &CscSplitMatrix,
    m: &CountTable<T>,
    col_start: usize,
    batch: usize,
) -> Result<NeighborSumBuffer<T>> {
    let mut scratch = SpmmScratch::new();
    spmm_csc_split_into(a, m, col_start, batch, &mut scratch)?;
    let n = a.num_rows();
    let mut data = vec![T::ZERO; n * batch];
    for (j, col) in data.chunks_mut(n.max(1)).enumerate().take(batch) {
        for (i, v) in col.iter_mut().enumerate() {
            *v = scratch.acc[i * batch + j];
        }
    }
    Ok(NeighborSumBuffer {
        num_rows: n,
        batch,
        data,
    })
}

/// `dst[i] += a[i] * b[i]` in a single pass. Rows are split into one static
/// contiguous chunk per worker when the column is long enough.
pub fn ema_accumulate<T: CountValue>(dst: &mut [T], a: &[T], b: &[T]) -> Result<()> {
    for len in [a.len(), b.len()] {
        if len != dst.len() {
            return Err(Error::LengthMismatch {
                expected: dst.len(),
                actual: len,
            });
        }
    }
    let fused = |(d, (x, y)): (&mut [T], (&[T], &[T]))| {
        for ((d, &x), &y) in d.iter_mut().zip(x).zip(y) {
            *d += x * y;
        }
    };
    let n = dst.len();
    if n < PAR_THRESHOLD {
        fused((dst, (a, b)));
    } else {
        let chunk = n.div_ceil(rayon::current_num_threads());
        dst.par_chunks_mut(chunk)
            .zip(a.par_chunks(chunk).zip(b.par_chunks(chunk)))
            .for_each(fused);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::graph::build_csc_split;

    #[test]
    fn spmv_examples() {
        let p = generate::path(3);
        assert_eq!(
            spmv_reference(&p, &[1.0f64, 2.0, 3.0]).unwrap(),
            vec![2.0, 4.0, 2.0]
        );
        let tri = generate::complete(3);
        assert_eq!(spmv_reference(&tri, &[1.0f32; 3]).unwrap(), vec![2.0; 3]);
        assert_eq!(spmv_reference(&tri, &[0.0f64; 3]).unwrap(), vec![0.0; 3]);
        assert!(matches!(
            spmv_reference(&tri, &[0.0f64; 2]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn spmm_path_batch_of_two() {
        let p = generate::path(3);
        let a = build_csc_split(&p, 2).unwrap();
        let m =
            CountTable::from_columns(3, &[vec![1.0f64, 2.0, 3.0], vec![10.0, 20.0, 30.0]]).unwrap();
        let out = spmm_csc_split(&a, &m, 0, 2).unwrap();
        assert_eq!(out.column(0), &[2.0, 4.0, 2.0]);
        assert_eq!(out.column(1), &[20.0, 40.0, 20.0]);
        let one = spmm_csc_split(&a, &m, 1, 1).unwrap();
        assert_eq!(
            one.column(0),
            spmv_reference(&p, m.column(1)).unwrap().as_slice()
        );
    }

    #[test]
    fn spmm_empty_graph_is_zero() {
        let g = Graph::empty(4);
        let a = build_csc_split(&g, 2).unwrap();
        let m = CountTable::from_columns(4, &[vec![1.0f32, 2.0, 3.0, 4.0]]).unwrap();
        let out = spmm_csc_split(&a, &m, 0, 1).unwrap();
        assert_eq!(out.column(0), &[0.0; 4]);
    }

    #[test]
    fn spmm_rejects_out_of_range_batch() {
        let p = generate::path(3);
        let a = build_csc_split(&p, 1).unwrap();
        let m = CountTable::<f64>::zeros(3, 2);
        assert!(spmm_csc_split(&a, &m, 1, 2).is_err());
        assert!(spmm_csc_split(&a, &m, 0, 0).is_err());
        let wrong_rows = CountTable::<f64>::zeros(4, 2);
        assert!(spmm_csc_split(&a, &wrong_rows, 0, 1).is_err());
    }

    #[test]
    fn ema_examples() {
        let mut dst = vec![0.0f64, 0.0];
        ema_accumulate(&mut dst, &[2.0, 3.0], &[5.0, 7.0]).unwrap();
        assert_eq!(dst, vec![10.0, 21.0]);
        let before = dst.clone();
        ema_accumulate(&mut dst, &[2.0, 3.0], &[0.0, 0.0]).unwrap();
        assert_eq!(dst, before);
        let mut zero = vec![0.0f32; 3];
        ema_accumulate(&mut zero, &[1.0; 3], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(zero, vec![4.0, 5.0, 6.0]);
        assert!(ema_accumulate(&mut zero, &[1.0; 2], &[1.0; 3]).is_err());
    }

    #[test]
    fn ema_large_column_matches_scalar_loop() {
        let n = 100_003;
        let a: Vec<f32> = (0..n).map(|i| (i % 13) as f32 * 0.37).collect();
        let b: Vec<f32> = (0..n).map(|i| (i % 7) as f32 * 1.3).collect();
        let mut dst: Vec<f32> = (0..n).map(|i| (i % 5) as f32).collect();
        let mut expect = dst.clone();
        for i in 0..n {
            expect[i] += a[i] * b[i];
        }
        ema_accumulate(&mut dst, &a, &b).unwrap();
        assert_eq!(dst, expect);
    }
}
