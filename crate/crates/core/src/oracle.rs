//! Exact non-induced tree counting for small instances, used as ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::template::{automorphism_count, TemplateTree};

pub const MAX_ORACLE_VERTICES: usize = 2000;
pub const MAX_ORACLE_TEMPLATE: usize = 8;

/// Number of (unordered) embeddings of a template in a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExactCount {
    pub value: u64,
    /// Injective adjacency-preserving maps, `value * alpha`.
    pub injective_maps: u64,
}

/// Counts injective maps of `t` into `g` that send template edges to graph
/// edges by backtracking in BFS order of the template, then divides by the
/// automorphism count.
pub fn exact_count(g: &Graph, t: &TemplateTree) -> Result<ExactCount> {
    let (n, k) = (g.num_vertices(), t.size());
    if n > MAX_ORACLE_VERTICES || k > MAX_ORACLE_TEMPLATE {
        return Err(Error::OracleLimit(format!(
            "n = {n}, k = {k} exceeds n <= {MAX_ORACLE_VERTICES}, k <= {MAX_ORACLE_TEMPLATE}"
        )));
    }
    // BFS order from vertex 0: every vertex after the first has its tree
    // parent earlier in the order, and no other earlier neighbor.
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; k];
    let mut placed = vec![false; k];
    placed[0] = true;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in t.neighbors(u) {
            if !placed[v] {
                placed[v] = true;
                parent[v] = u;
                order.push(v);
            }
        }
    }
    let mut image = vec![u32::MAX; k];
    let mut used = vec![false; n];
    let mut total: u64 = 0;
    for root in 0..n {
        image[order[0]] = root as u32;
        used[root] = true;
        extend(g, &order, &parent, 1, &mut image, &mut used, &mut total)?;
        used[root] = false;
    }
    let alpha = automorphism_count(t);
    let alpha = u64::try_from(alpha).expect("alpha of a template within the oracle limit fits u64");
    assert_eq!(
        total % alpha,
        0,
        "injective map count must be a multiple of alpha"
    );
    Ok(ExactCount {
        value: total / alpha,
        injective_maps: total,
    })
}

fn extend(
    g: &Graph,
    order: &[usize],
    parent: &[usize],
    depth: usize,
    image: &mut [u32],
    used: &mut [bool],
    total: &mut u64,
) -> Result<()> {
    if depth == order.len() {
        *total = total
            .checked_add(1)
            .ok_or_else(|| Error::OracleLimit("embedding count overflows u64".into()))?;
        return Ok(());
    }
    let v = order[depth];
    let anchor = image[parent[v]] as usize;
    if depth + 1 == order.len() {
        let free = g
            .neighbors(anchor)
            .iter()
            .filter(|&&w| !used[w as usize])
            .count() as u64;
        *total = total
            .checked_add(free)
            .ok_or_else(|| Error::OracleLimit("embedding count overflows u64".into()))?;
        return Ok(());
    }
    for &w in g.neighbors(anchor) {
        let w = w as usize;
        if used[w] {
            continue;
        }
        used[w] = true;
        image[v] = w as u32;
        extend(g, order, parent, depth + 1, image, used, total)?;
        used[w] = false;
    }
    Ok(())
}

pub const MAX_SUBSET_ORACLE_VERTICES: usize = 12;
pub const MAX_SUBSET_ORACLE_TEMPLATE: usize = 6;

/// Independent second counter: for every `k`-vertex subset and every choice
/// of `k - 1` edges among those vertices, test by trying all bijections
/// whether the chosen edges form a copy of `t`.
pub fn exact_count_by_subsets(g: &Graph, t: &TemplateTree) -> Result<u64> {
    let (n, k) = (g.num_vertices(), t.size());
    if n > MAX_SUBSET_ORACLE_VERTICES || k > MAX_SUBSET_ORACLE_TEMPLATE {
        return Err(Error::OracleLimit(format!(
            "subset enumeration is limited to n <= {MAX_SUBSET_ORACLE_VERTICES}, \
             k <= {MAX_SUBSET_ORACLE_TEMPLATE}"
        )));
    }
    if k > n {
        return Ok(0);
    }
    let perms = permutations(k);
    let mut count = 0u64;
    for subset in subsets(n, k) {
        let mut induced = Vec::new();
        for (x, &u) in subset.iter().enumerate() {
            for &v in &subset[x + 1..] {
                if g.has_edge(u, v) {
                    induced.push((u, v));
                }
            }
        }
        for chosen in subsets(induced.len(), k - 1) {
            let edges: Vec<(usize, usize)> = chosen.iter().map(|&e| induced[e]).collect();
            let is_copy = perms.iter().any(|perm| {
                t.edges().iter().all(|&(a, b)| {
                    let (x, y) = (subset[perm[a]], subset[perm[b]]);
                    edges.contains(&(x.min(y), x.max(y)))
                })
            });
            if is_copy {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}
