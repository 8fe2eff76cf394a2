//! Undirected input networks in CSR form and the row-partitioned CSC-Split
//! layout consumed by the SpMM kernel.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::ops::Range;
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph stored as a symmetric 0-1 CSR adjacency matrix.
///
/// Every undirected edge `{u, v}` is materialized twice (`v` in the row of
/// `u` and `u` in the row of `v`). Each row is sorted ascending, free of
/// duplicates, and never contains its own vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_edges: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
}

impl Graph {
    /// Builds the canonical graph from an arbitrary edge list. Self-loops are
    /// dropped and duplicate edges (in either orientation) are collapsed.
    pub fn from_edges<I>(num_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        if num_vertices > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "{num_vertices} vertices exceeds the 32-bit vertex id range"
            )));
        }
        let mut directed: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= num_vertices {
                    return Err(Error::InvalidArgument(format!(
                        "vertex {w} out of range for n = {num_vertices}"
                    )));
                }
            }
            if u != v {
                directed.push((u, v));
                directed.push((v, u));
            }
        }
        directed.sort_unstable();
        directed.dedup();

        let mut row_offsets = vec![0usize; num_vertices + 1];
        for &(u, _) in &directed {
            row_offsets[u as usize + 1] += 1;
        }
        for i in 0..num_vertices {
            row_offsets[i + 1] += row_offsets[i];
        }
        let col_indices: Vec<u32> = directed.into_iter().map(|(_, v)| v).collect();
        Ok(Graph {
            num_edges: col_indices.len() / 2,
            row_offsets,
            col_indices,
        })
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(num_vertices: usize) -> Self {
        Graph {
            num_edges: 0,
            row_offsets: vec![0; num_vertices + 1],
            col_indices: Vec::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.row_offsets.len() - 1
    }

    /// Number of unique undirected edges.
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    /// Sorted neighbor list of vertex `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.col_indices[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.row_offsets[v + 1] - self.row_offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_vertices()).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (u as u32) < v)
                .map(move |&v| (u as u32, v))
        })
    }

    /// Disjoint union: the vertices of `other` are shifted by `self.num_vertices()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.num_vertices() as u32;
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + shift, v + shift)));
        Graph::from_edges(self.num_vertices() + other.num_vertices(), edges)
            .expect("union of valid graphs is valid")
    }

    /// Serializes to the `n m` header edge-list format read by [`load_graph`].
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.num_vertices(), self.num_edges())?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn summary(&self) -> GraphSummary {
        let stats = degree_stats(self);
        GraphSummary {
            n: self.num_vertices(),
            m: self.num_edges(),
            avg_deg: stats.avg_degree,
            max_deg: stats.max_degree,
        }
    }
}

/// Printable graph summary, `{"n":..,"m":..,"avg_deg":..,"max_deg":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub avg_deg: f64,
    pub max_deg: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub avg_degree: f64,
    pub max_degree: usize,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let n = g.num_vertices();
    let avg_degree = if n == 0 {
        0.0
    } else {
        2.0 * g.num_edges() as f64 / n as f64
    };
    let max_degree = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    DegreeStats {
        avg_degree,
        max_degree,
    }
}

/// Raw contents of an edge-list file: the header and the edge lines with
/// their 1-based line numbers.
#[derive(Debug, Clone)]
pub(crate) struct RawEdgeList {
    pub num_vertices: usize,
    pub edges: Vec<(u32, u32, usize)>,
}

fn parse_pair(line: &str, lineno: usize, what: &str) -> Result<(u64, u64)> {
    let mut it = line.split_whitespace();
    let a = it.next();
    let b = it.next();
    match (a, b, it.next()) {
        (Some(a), Some(b), None) => {
            let a = a
                .parse::<u64>()
                .map_err(|_| Error::parse(lineno, format!("expected {what}, found {line:?}")))?;
            let b = b
                .parse::<u64>()
                .map_err(|_| Error::parse(lineno, format!("expected {what}, found {line:?}")))?;
            Ok((a, b))
        }
        _ => Err(Error::parse(
            lineno,
            format!("expected {what}, found {line:?}"),
        )),
    }
}

/// Reads the `n m` header followed by `u v` lines. Blank lines and lines
/// starting with `#` or `%` are ignored.
pub(crate) fn read_edge_list<R: BufRead>(source: R) -> Result<RawEdgeList> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        match header {
            None => {
                let (n, m) = parse_pair(trimmed, lineno, "header \"n m\"")?;
                if n > u32::MAX as u64 {
                    return Err(Error::parse(lineno, format!("vertex count {n} too large")));
                }
                header = Some((n as usize, m as usize));
            }
            Some((n, _)) => {
                let (u, v) = parse_pair(trimmed, lineno, "edge \"u v\"")?;
                for w in [u, v] {
                    if w >= n as u64 {
                        return Err(Error::parse(
                            lineno,
                            format!("vertex id {w} out of range for n = {n}"),
                        ));
                    }
                }
                edges.push((u as u32, v as u32, lineno));
            }
        }
    }
    let (num_vertices, _declared_edges) = header
        .ok_or_else(|| Error::parse(last_line.max(1), "empty input, missing \"n m\" header"))?;
    Ok(RawEdgeList {
        num_vertices,
        edges,
    })
}

/// Parses an edge-list text stream into a canonical [`Graph`].
pub fn load_graph<R: BufRead>(source: R) -> Result<Graph> {
    let raw = read_edge_list(source)?;
    Graph::from_edges(
        raw.num_vertices,
        raw.edges.into_iter().map(|(u, v, _)| (u, v)),
    )
}

/// Opens a plain or gzip-compressed file (detected from the magic bytes).
pub fn open_text(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 2];
    let read = file.read(&mut magic).map_err(|e| Error::io(path, e))?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if read == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

pub fn load_graph_file(path: &Path) -> Result<Graph> {
    load_graph(open_text(path)?)
}

/// Single nonzero of the adjacency matrix inside a CSC-Split partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitEntry {
    pub row: u32,
    pub col: u32,
}

/// CSC layout whose nonzeros are bucketed into contiguous row ranges.
///
/// Partition `p` owns rows `[p * block, min((p + 1) * block, n))` and holds
/// exactly the nonzeros in those rows, sorted by `(col, row)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CscSplitMatrix {
    num_rows: usize,
    block_rows: usize,
    partitions: Vec<Vec<SplitEntry>>,
}

impl CscSplitMatrix {
    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    /// Rows per partition; the last non-empty block may be shorter.
    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn row_range(&self, p: usize) -> Range<usize> {
        let lo = (p * self.block_rows).min(self.num_rows);
        let hi = ((p + 1) * self.block_rows).min(self.num_rows);
        lo..hi
    }

    pub fn partition(&self, p: usize) -> &[SplitEntry] {
        &self.partitions[p]
    }

    pub fn partitions(&self) -> &[Vec<SplitEntry>] {
        &self.partitions
    }

    pub fn num_entries(&self) -> usize {
        self.partitions.iter().map(Vec::len).sum()
    }
}

pub fn build_csc_split(g: &Graph, num_partitions: usize) -> Result<CscSplitMatrix> {
    let n = g.num_vertices();
    if num_partitions == 0 || num_partitions > n {
        return Err(Error::InvalidArgument(format!(
            "num_partitions must be in [1, {n}], got {num_partitions}"
        )));
    }
    let block_rows = n.div_ceil(num_partitions);
    let mut partitions = vec![Vec::new(); num_partitions];
    // The adjacency is symmetric, so column c of the CSC holds exactly the
    // CSR row c. Walking columns in order keeps each bucket (col, row)-sorted.
    for col in 0..n {
        for &row in g.neighbors(col) {
            partitions[row as usize / block_rows].push(SplitEntry {
                row,
                col: col as u32,
            });
        }
    }
    Ok(CscSplitMatrix {
        num_rows: n,
        block_rows,
        partitions,
    })
}

/// Partition count used when none is requested: eight per worker, clamped to `[1, n]`.
pub fn default_num_partitions(num_vertices: usize, workers: usize) -> usize {
    (workers.max(1) * 8).min(num_vertices).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Graph> {
        load_graph(s.as_bytes())
    }

    #[test]
    fn triangle() {
        let g = parse("3 3\n0 1\n1 2\n0 2").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = parse("2 1\n0 1\n0 1").unwrap();
        assert_eq!(g.num_edges(), 1);
        let g = parse("2 2\n0 1\n1 0").unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn self_loop_dropped() {
        let g = parse("3 2\n0 0\n0 1").unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.degrees(), vec![1, 1, 0]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        match parse("3 1\n0 1\n0 x") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse("3 1\n# comment\n0 3") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse("3 1 7\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("\n\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn csc_split_single_partition_is_full_csc() {
        let g = parse("3 3\n0 1\n1 2\n0 2").unwrap();
        let a = build_csc_split(&g, 1).unwrap();
        let expect: Vec<SplitEntry> = [(1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(row, col)| SplitEntry { row, col })
            .collect();
        assert_eq!(a.partition(0), expect.as_slice());
    }

    #[test]
    fn csc_split_one_row_per_partition() {
        let g = parse("3 3\n0 1\n1 2\n0 2").unwrap();
        let a = build_csc_split(&g, 3).unwrap();
        for p in 0..3 {
            assert_eq!(a.row_range(p), p..p + 1);
            let part = a.partition(p);
            assert_eq!(part.len(), 2);
            let cols: Vec<u32> = part.iter().map(|e| e.col).collect();
            assert_eq!(cols, g.neighbors(p));
            assert!(part.iter().all(|e| e.row as usize == p));
        }
    }

    #[test]
    fn csc_split_path_two_partitions() {
        let g = parse("3 2\n0 1\n1 2").unwrap();
        let a = build_csc_split(&g, 2).unwrap();
        assert_eq!(a.row_range(0), 0..2);
        assert_eq!(a.row_range(1), 2..3);
        let e = |row, col| SplitEntry { row, col };
        assert_eq!(a.partition(0), &[e(1, 0), e(0, 1), e(1, 2)]);
        assert_eq!(a.partition(1), &[e(2, 1)]);
    }

    #[test]
    fn csc_split_rejects_bad_partition_counts() {
        let g = parse("3 2\n0 1\n1 2").unwrap();
        assert!(build_csc_split(&g, 0).is_err());
        assert!(build_csc_split(&g, 4).is_err());
    }

    #[test]
    fn short_trailing_partitions_are_empty() {
        // n = 10, p = 7 -> block 2, partitions 5 and 6 own no rows.
        let g = Graph::from_edges(10, (0..9).map(|i| (i, i + 1))).unwrap();
        let a = build_csc_split(&g, 7).unwrap();
        assert_eq!(a.block_rows(), 2);
        assert_eq!(a.row_range(6), 10..10);
        assert!(a.partition(6).is_empty());
        assert_eq!(a.num_entries(), g.col_indices().len());
    }

    #[test]
    fn degree_stats_examples() {
        let tri = parse("3 3\n0 1\n1 2\n0 2").unwrap();
        assert_eq!(
            degree_stats(&tri),
            DegreeStats {
                avg_degree: 2.0,
                max_degree: 2
            }
        );
        let star = parse("4 3\n0 1\n0 2\n0 3").unwrap();
        assert_eq!(
            degree_stats(&star),
            DegreeStats {
                avg_degree: 1.5,
                max_degree: 3
            }
        );
        let empty = parse("3 0").unwrap();
        assert_eq!(
            degree_stats(&empty),
            DegreeStats {
                avg_degree: 0.0,
                max_degree: 0
            }
        );
    }

    #[test]
    fn summary_json_shape() {
        let tri = parse("3 3\n0 1\n1 2\n0 2").unwrap();
        let json = serde_json::to_string(&tri.summary()).unwrap();
        assert_eq!(json, r#"{"n":3,"m":3,"avg_deg":2.0,"max_deg":2}"#);
    }

    #[test]
    fn gzip_input_is_detected() {
        use flate2::{write::GzEncoder, Compression};
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tri.txt.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), Compression::default());
        enc.write_all(b"3 3\n0 1\n1 2\n0 2\n").unwrap();
        enc.finish().unwrap();
        let g = load_graph_file(&path).unwrap();
        assert_eq!(g.num_edges(), 3);
    }
}
