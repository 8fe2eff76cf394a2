//! Tree templates, their recursive active/passive decomposition, and the
//! normalization constants of the color-coding estimator.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::read_edge_list;

/// Largest template the estimator accepts; keeps every binomial coefficient
/// and color index comfortably inside 64 bits.
pub const MAX_TEMPLATE_SIZE: usize = 31;

/// A tree template `T` with a designated root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateTree {
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    root: usize,
}

impl TemplateTree {
    /// Validates that `edges` form a tree on `num_vertices` vertices.
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>, root: usize) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::NotATree("template has no vertices".into()));
        }
        if root >= num_vertices {
            return Err(Error::InvalidArgument(format!(
                "root {root} out of range for a template with {num_vertices} vertices"
            )));
        }
        if edges.len() != num_vertices - 1 {
            return Err(Error::NotATree(format!(
                "{} vertices need {} edges, found {}",
                num_vertices,
                num_vertices - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); num_vertices];
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidArgument(format!(
                    "template edge ({u}, {v}) out of range"
                )));
            }
            if u == v {
                return Err(Error::NotATree(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::NotATree(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        // k - 1 distinct edges plus connectivity rules out cycles.
        let reached = bfs_order(&adjacency, 0, None).len();
        if reached != num_vertices {
            return Err(Error::NotATree(format!(
                "not connected: {reached} of {num_vertices} vertices reachable"
            )));
        }
        Ok(TemplateTree {
            edges,
            adjacency,
            root,
        })
    }

    /// Number of template vertices `k`.
    pub fn size(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn with_root(&self, root: usize) -> Result<Self> {
        TemplateTree::new(self.size(), self.edges.clone(), root)
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.size(), self.edges.len())?;
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Canonical string of the unrooted tree; equal iff isomorphic.
    pub fn canonical_form(&self) -> String {
        centers(&self.adjacency)
            .into_iter()
            .map(|c| rooted_canon(&self.adjacency, c, None).0)
            .min()
            .expect("a tree has at least one center")
    }
}

/// Reads a template in the graph edge-list format. Unlike graphs, templates
/// are not cleaned up: duplicates, self-loops and cycles are rejected.
pub fn load_template<R: BufRead>(source: R, root: Option<usize>) -> Result<TemplateTree> {
    let raw = read_edge_list(source)?;
    let edges = raw
        .edges
        .iter()
        .map(|&(u, v, _)| (u as usize, v as usize))
        .collect();
    TemplateTree::new(raw.num_vertices, edges, root.unwrap_or(0))
}

pub fn load_template_file(path: &std::path::Path, root: Option<usize>) -> Result<TemplateTree> {
    load_template(crate::graph::open_text(path)?, root)
}

fn bfs_order(adj: &[Vec<usize>], start: usize, blocked: Option<usize>) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = vec![start];
    seen[start] = true;
    if let Some(b) = blocked {
        seen[b] = true;
    }
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                order.push(v);
            }
        }
    }
    order
}

/// One node of the sub-template chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubTemplate {
    /// Template vertices covered, sorted.
    pub vertices: Vec<usize>,
    /// Root vertex (a template vertex id).
    pub root: usize,
    /// `(active, passive)` chain indices; `None` for single-vertex leaves.
    pub children: Option<(usize, usize)>,
}

impl SubTemplate {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// The recursive partition of a template. Index 0 is the whole template and
/// every child has a larger index than its parent, so evaluating indices in
/// descending order visits children before parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubTemplateChain {
    subs: Vec<SubTemplate>,
}

impl SubTemplateChain {
    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn get(&self, s: usize) -> &SubTemplate {
        &self.subs[s]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SubTemplate> {
        self.subs.iter()
    }

    /// Size of the full template.
    pub fn template_size(&self) -> usize {
        self.subs[0].size()
    }

    /// Sub-template indices, children before parents.
    pub fn evaluation_order(&self) -> impl Iterator<Item = usize> {
        (0..self.subs.len()).rev()
    }

    /// Index of the parent of `s`, or `None` for the full template.
    pub fn parent(&self, s: usize) -> Option<usize> {
        self.subs.iter().position(|t| match t.children {
            Some((a, p)) => a == s || p == s,
            None => false,
        })
    }
}

/// Cuts the edge from the root to its lowest-numbered neighbor inside the
/// current sub-template, recursively, until only single vertices remain.
pub fn partition_template(t: &TemplateTree) -> SubTemplateChain {
    let mut subs = vec![SubTemplate {
        vertices: (0..t.size()).collect(),
        root: t.root(),
        children: None,
    }];
    let mut s = 0;
    while s < subs.len() {
        if subs[s].size() > 1 {
            let root = subs[s].root;
            let members: BTreeSet<usize> = subs[s].vertices.iter().copied().collect();
            let tau = *t
                .neighbors(root)
                .iter()
                .find(|v| members.contains(v))
                .expect("a connected sub-template with two or more vertices has a root edge");
            // Passive side: everything reachable from tau without crossing the cut edge.
            let mut passive = Vec::new();
            let mut stack = vec![tau];
            let mut seen = BTreeSet::from([root, tau]);
            while let Some(u) = stack.pop() {
                passive.push(u);
                for &w in t.neighbors(u) {
                    if members.contains(&w) && seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            passive.sort_unstable();
            let active: Vec<usize> = members
                .iter()
                .copied()
                .filter(|v| passive.binary_search(v).is_err())
                .collect();
            let a = subs.len();
            subs.push(SubTemplate {
                vertices: active,
                root,
                children: None,
            });
            subs.push(SubTemplate {
                vertices: passive,
                root: tau,
                children: None,
            });
            subs[s].children = Some((a, a + 1));
        }
        s += 1;
    }
    SubTemplateChain { subs }
}

/// Returns the AHU canonical string and the automorphism count of the
/// subtree hanging at `v`.
fn rooted_canon(adj: &[Vec<usize>], v: usize, parent: Option<usize>) -> (String, u128) {
    let mut kids: Vec<(String, u128)> = adj[v]
        .iter()
        .filter(|&&w| Some(w) != parent)
        .map(|&w| rooted_canon(adj, w, Some(v)))
        .collect();
    kids.sort();
    let mut aut: u128 = 1;
    let mut run = 0u128;
    for i in 0..kids.len() {
        aut *= kids[i].1;
        run = if i > 0 && kids[i].0 == kids[i - 1].0 {
            run + 1
        } else {
            1
        };
        // Accumulate run! one factor at a time.
        aut *= run;
    }
    let mut canon = String::with_capacity(2 + kids.iter().map(|k| k.0.len()).sum::<usize>());
    canon.push('(');
    for k in &kids {
        canon.push_str(&k.0);
    }
    canon.push(')');
    (canon, aut)
}

/// One or two central vertices found by repeatedly stripping leaves.
fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in &adj[leaf] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Number of automorphisms of the unrooted tree (the template root is
/// ignored), via canonical forms of the subtrees hanging off its center.
pub fn automorphism_count(t: &TemplateTree) -> u128 {
    let adj = &t.adjacency;
    match centers(adj).as_slice() {
        [c] => rooted_canon(adj, *c, None).1,
        [c1, c2] => {
            let (s1, a1) = rooted_canon(adj, *c1, Some(*c2));
            let (s2, a2) = rooted_canon(adj, *c2, Some(*c1));
            a1 * a2 * if s1 == s2 { 2 } else { 1 }
        }
        _ => unreachable!("trees have one or two centers"),
    }
}

/// Probability `k!/k^k` that `k` uniformly colored vertices get distinct colors.
pub fn colorful_probability(k: usize) -> f64 {
    assert!(k >= 1, "template size must be positive");
    (1..=k).map(|i| i as f64 / k as f64).product()
}

/// Iteration count `ceil(e^k ln(1/delta) / epsilon^2)`, at least 1.
pub fn required_iterations(epsilon: f64, delta: f64, k: usize) -> Result<usize> {
    let valid = epsilon > 0.0 && delta > 0.0 && delta < 1.0;
    if !valid {
        return Err(Error::InvalidArgument(format!(
            "need epsilon > 0 and 0 < delta < 1, got epsilon = {epsilon}, delta = {delta}"
        )));
    }
    let n = ((k as f64).exp() * (1.0 / delta).ln() / (epsilon * epsilon)).ceil();
    Ok(if n.is_finite() && n >= 1.0 {
        n as usize
    } else {
        1
    })
}

pub fn path_template(k: usize) -> TemplateTree {
    TemplateTree::new(k, (1..k).map(|i| (i - 1, i)).collect(), 0).expect("valid path")
}

pub fn star_template(k: usize) -> TemplateTree {
    TemplateTree::new(k, (1..k).map(|i| (0, i)).collect(), 0).expect("valid star")
}

/// Relabels a tree in BFS order from its first center, rooted there.
fn normalized(adj: &[Vec<usize>]) -> TemplateTree {
    let c = centers(adj)[0];
    let order = bfs_order(adj, c, None);
    let mut label = vec![0; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        label[v] = i;
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (u, nbrs) in adj.iter().enumerate() {
        for &v in nbrs {
            if label[u] < label[v] {
                edges.push((label[u], label[v]));
            }
        }
    }
    edges.sort_unstable_by_key(|&(u, v)| (v, u));
    TemplateTree::new(adj.len(), edges, 0).expect("relabeling preserves the tree")
}

/// Every non-isomorphic free tree on `k` vertices, ordered by canonical form.
pub fn all_free_trees(k: usize) -> Vec<TemplateTree> {
    assert!(k >= 1);
    let mut level: Vec<TemplateTree> = vec![TemplateTree::new(1, vec![], 0).unwrap()];
    for size in 2..=k {
        let mut next: std::collections::BTreeMap<String, TemplateTree> = Default::default();
        for t in &level {
            for v in 0..t.size() {
                let mut edges = t.edges.clone();
                edges.push((v, size - 1));
                let grown = TemplateTree::new(size, edges, 0).unwrap();
                next.entry(grown.canonical_form())
                    .or_insert_with(|| normalized(&grown.adjacency));
            }
        }
        level = next.into_values().collect();
    }
    level
}
