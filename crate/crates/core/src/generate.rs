//! Small synthetic graph families used by tests, benchmarks and examples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n as u32).map(|i| (i - 1, i))).expect("valid path")
}

pub fn star(n: usize) -> Graph {
    Graph::from_edges(n, (1..n as u32).map(|i| (0, i))).expect("valid star")
}

pub fn cycle(n: usize) -> Graph {
    let n32 = n as u32;
    Graph::from_edges(n, (0..n32).map(|i| (i, (i + 1) % n32))).expect("valid cycle")
}

pub fn complete(n: usize) -> Graph {
    let n32 = n as u32;
    let edges = (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("valid complete graph")
}

/// Uniform random graph with `n` vertices where each pair is an edge with
/// probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("valid gnp")
}

/// Random graph with `n` vertices and (up to) `m` distinct edges.
pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    let m = m.min(max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = std::collections::BTreeSet::new();
    while set.len() < m {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u != v {
            set.insert((u.min(v), u.max(v)));
        }
    }
    Graph::from_edges(n, set).expect("valid gnm")
}

/// Uniform simple `d`-regular graph from the pairing model, retrying until
/// the pairing has no loops or repeated edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if !(n * d).is_multiple_of(2) || d >= n {
        return Err(Error::InvalidArgument(format!(
            "no simple {d}-regular graph on {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<u32> = (0..n as u32)
        .flat_map(|v| std::iter::repeat_n(v, d))
        .collect();
    'attempt: for _ in 0..10_000 {
        stubs.shuffle(&mut rng);
        let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Graph::from_edges(n, seen);
    }
    Err(Error::InvalidArgument(format!(
        "pairing model did not produce a simple {d}-regular graph on {n} vertices"
    )))
}

/// Preferential attachment: starts from a clique on `m + 1` vertices and
/// attaches every new vertex to `m` distinct existing vertices chosen with
/// probability proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Graph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut targets: Vec<u32> = Vec::new();
    for u in 0..=m as u32 {
        for v in u + 1..=m as u32 {
            edges.push((u, v));
            targets.push(u);
            targets.push(v);
        }
    }
    for v in (m + 1) as u32..n as u32 {
        let mut chosen: Vec<u32> = Vec::with_capacity(m);
        while chosen.len() < m {
            let t = targets[rng.gen_range(0..targets.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for t in chosen {
            edges.push((t, v));
            targets.push(t);
            targets.push(v);
        }
    }
    Graph::from_edges(n, edges).expect("valid preferential attachment graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_degrees() {
        let g = random_regular(100, 4, 3).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert_eq!(g.num_edges(), 200);
    }

    #[test]
    fn barabasi_albert_edge_count() {
        let g = barabasi_albert(200, 2, 1);
        assert_eq!(g.num_edges(), 3 + 2 * (200 - 3));
    }

    #[test]
    fn gnm_edge_count() {
        assert_eq!(gnm(20, 30, 5).num_edges(), 30);
        assert_eq!(gnm(4, 100, 5).num_edges(), 6);
    }

    #[test]
    fn families() {
        assert_eq!(complete(4).num_edges(), 6);
        assert_eq!(cycle(5).degrees(), vec![2; 5]);
        assert_eq!(star(4).degrees(), vec![3, 1, 1, 1]);
        assert_eq!(path(3).degrees(), vec![1, 2, 1]);
    }
}
