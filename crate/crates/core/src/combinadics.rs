//! Lexicographic ranking of color sets and the precomputed color-set splits
//! used by the count-update stage.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::template::{SubTemplateChain, MAX_TEMPLATE_SIZE};

/// Exact binomial coefficients `C(a, b)` for `0 <= a, b <= k`.
#[derive(Debug, Clone)]
pub struct Binomials {
    table: Vec<Vec<u64>>,
}

impl Binomials {
    pub fn new(k: usize) -> Self {
        let mut table = vec![vec![0u64; k + 1]; k + 1];
        for a in 0..=k {
            table[a][0] = 1;
            for b in 1..=a {
                table[a][b] = table[a - 1][b - 1] + if b < a { table[a - 1][b] } else { 0 };
            }
        }
        Binomials { table }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u64 {
        if b > a {
            0
        } else {
            self.table[a][b]
        }
    }
}

/// Bijection between size-`t` subsets of `{0..k}` and `[0, C(k, t))` in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct ColorSetIndexer {
    k: usize,
    binom: Binomials,
}

impl ColorSetIndexer {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_TEMPLATE_SIZE {
            return Err(Error::InvalidArgument(format!(
                "number of colors must be in [1, {MAX_TEMPLATE_SIZE}], got {k}"
            )));
        }
        Ok(ColorSetIndexer {
            k,
            binom: Binomials::new(k),
        })
    }

    pub fn num_colors(&self) -> usize {
        self.k
    }

    pub fn binomial(&self, a: usize, b: usize) -> u64 {
        self.binom.get(a, b)
    }

    /// Number of color sets of the given size, i.e. columns of a count table.
    pub fn num_sets(&self, size: usize) -> usize {
        self.binom.get(self.k, size) as usize
    }

    pub fn rank(&self, colors: &[usize]) -> Result<usize> {
        if colors.is_empty() {
            return Err(Error::InvalidArgument("empty color set".into()));
        }
        if colors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "color set {colors:?} is not strictly increasing"
            )));
        }
        if colors[colors.len() - 1] >= self.k {
            return Err(Error::InvalidArgument(format!(
                "color set {colors:?} has a color >= {}",
                self.k
            )));
        }
        Ok(self.rank_unchecked(colors))
    }

    /// Rank of a sorted, distinct, in-range color set.
    #[inline]
    pub(crate) fn rank_unchecked(&self, colors: &[usize]) -> usize {
        let t = colors.len();
        // Complement of the co-lexicographic rank of the mirrored set.
        let mut tail = 0u64;
        for (i, &c) in colors.iter().enumerate() {
            tail += self.binom.get(self.k - 1 - c, t - i);
        }
        (self.binom.get(self.k, t) - 1 - tail) as usize
    }

    pub fn unrank(&self, index: usize, size: usize) -> Result<Vec<usize>> {
        let total = self.num_sets(size);
        if size == 0 || size > self.k || index >= total {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for color sets of size {size} over {} colors",
                self.k
            )));
        }
        let mut rest = index as u64;
        let mut out = Vec::with_capacity(size);
        let mut v = 0;
        for i in 0..size {
            loop {
                let with_v = self.binom.get(self.k - 1 - v, size - 1 - i);
                if rest < with_v {
                    break;
                }
                rest -= with_v;
                v += 1;
            }
            out.push(v);
            v += 1;
        }
        Ok(out)
    }
}

/// All `(active, passive)` column-index pairs for color sets of one size.
///
/// Row `I` (a color set of size `set_size`) lists `C(set_size, active_size)`
/// pairs, one per way to choose the active colors, in lexicographic order of
/// the active subset's positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitList {
    pub set_size: usize,
    pub active_size: usize,
    pub per_set: usize,
    pairs: Vec<(u32, u32)>,
}

impl SplitList {
    fn build(ix: &ColorSetIndexer, set_size: usize, active_size: usize) -> Self {
        let passive_size = set_size - active_size;
        let per_set = ix.binomial(set_size, active_size) as usize;
        let num_sets = ix.num_sets(set_size);
        let mut pairs = Vec::with_capacity(num_sets * per_set);
        let mut active = Vec::with_capacity(active_size);
        let mut passive = Vec::with_capacity(passive_size);
        for idx in 0..num_sets {
            let colors = ix.unrank(idx, set_size).expect("index in range");
            for pick in combinations(set_size, active_size) {
                active.clear();
                passive.clear();
                let mut next = pick.iter().peekable();
                for (pos, &c) in colors.iter().enumerate() {
                    if next.peek() == Some(&&pos) {
                        next.next();
                        active.push(c);
                    } else {
                        passive.push(c);
                    }
                }
                pairs.push((
                    ix.rank_unchecked(&active) as u32,
                    ix.rank_unchecked(&passive) as u32,
                ));
            }
        }
        SplitList {
            set_size,
            active_size,
            per_set,
            pairs,
        }
    }

    /// Splits of the color set with column index `set_index`.
    #[inline]
    pub fn splits(&self, set_index: usize) -> &[(u32, u32)] {
        &self.pairs[set_index * self.per_set..(set_index + 1) * self.per_set]
    }

    pub fn num_sets(&self) -> usize {
        self.pairs.len() / self.per_set.max(1)
    }

    pub fn total_pairs(&self) -> usize {
        self.pairs.len()
    }
}

/// Lexicographic `r`-subsets of `0..n` as position lists.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    if r > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] != i + n - r) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Per sub-template split lists. Sub-templates with the same
/// `(|T_s|, |T_{s,a}|)` share one list.
#[derive(Debug, Clone)]
pub struct SplitTable {
    per_sub: Vec<Option<Arc<SplitList>>>,
}

impl SplitTable {
    pub fn get(&self, s: usize) -> Option<&SplitList> {
        self.per_sub[s].as_deref()
    }
}

pub fn build_split_table(chain: &SubTemplateChain, indexer: &ColorSetIndexer) -> SplitTable {
    let mut cache: HashMap<(usize, usize), Arc<SplitList>> = HashMap::new();
    let per_sub = chain
        .iter()
        .map(|sub| {
            sub.children.map(|(a, _)| {
                let key = (sub.size(), chain.get(a).size());
                cache
                    .entry(key)
                    .or_insert_with(|| Arc::new(SplitList::build(indexer, key.0, key.1)))
                    .clone()
            })
        })
        .collect();
    SplitTable { per_sub }
}
