//! Canonical uniform hypergraphs and the set-algebra kernels every checker
//! reduces to.

use crate::bitset::BitSet;
use crate::error::{HxError, Result};
use serde::{Deserialize, Serialize};

/// An edge is a bit vector with exactly `r` set positions.
pub type Edge = BitSet;

/// An `n`-vertex `r`-uniform hypergraph with duplicate-free edges held in
/// colexicographic order. Isolated vertices are permitted and recorded only
/// via `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<Edge>,
}

impl Hypergraph {
    /// Builds a canonical hypergraph from raw vertex lists: validates,
    /// deduplicates, and sorts colexicographically. Idempotent.
    pub fn canonicalize(raw_edges: &[Vec<usize>], n: usize, r: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(raw_edges.len());
        for raw in raw_edges {
            if raw.len() != r {
                return Err(HxError::EdgeSizeMismatch {
                    expected: r,
                    found: raw.len(),
                });
            }
            let mut e = BitSet::new(n);
            for &v in raw {
                if v >= n {
                    return Err(HxError::VertexOutOfRange { vertex: v, n });
                }
                if e.contains(v) {
                    return Err(HxError::DuplicateVertexInEdge { vertex: v });
                }
                e.insert(v);
            }
            edges.push(e);
        }
        edges.sort();
        edges.dedup();
        Ok(Hypergraph { n, r, edges })
    }

    /// Assembles from already-built edge bit vectors; same canonicalization.
    pub fn from_edge_sets(edges: Vec<Edge>, n: usize, r: usize) -> Result<Self> {
        for e in &edges {
            if e.count() != r {
                return Err(HxError::EdgeSizeMismatch {
                    expected: r,
                    found: e.count(),
                });
            }
            if e.universe_size() != n {
                return Err(HxError::VertexOutOfRange {
                    vertex: e.universe_size(),
                    n,
                });
            }
        }
        let mut edges = edges;
        edges.sort();
        edges.dedup();
        Ok(Hypergraph { n, r, edges })
    }

    pub fn empty(n: usize, r: usize) -> Self {
        Hypergraph {
            n,
            r,
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    /// Edge lists as sorted vertex vectors, in canonical order.
    pub fn edge_lists(&self) -> Vec<Vec<usize>> {
        self.edges.iter().map(|e| e.to_vec()).collect()
    }
}

/// A duplicate-free family of arbitrary-size subsets of `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetFamily {
    n: usize,
    sets: Vec<BitSet>,
}

impl SubsetFamily {
    pub fn new(n: usize, mut sets: Vec<BitSet>) -> Self {
        sets.sort();
        sets.dedup();
        SubsetFamily { n, sets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[BitSet] {
        &self.sets
    }
}

/// `(A \ B) ∪ (B \ A)`.
pub fn symmetric_difference(a: &Edge, b: &Edge) -> BitSet {
    a.symmetric_difference(b)
}

/// Cardinality of the union of a nonempty list of sets.
pub fn union_size(sets: &[BitSet]) -> Result<usize> {
    let first = sets.first().ok_or(HxError::EmptyList)?;
    let mut u = first.clone();
    for s in &sets[1..] {
        u.union_with(s);
    }
    Ok(u.count())
}

/// The overlap defect `f(X_1,…,X_s) = Σ|X_i| − |∪X_i|`; always ≥ 0 and
/// monotone under replacing each `X_i` by a superset.
pub fn overlap_defect(sets: &[BitSet]) -> Result<usize> {
    let total: usize = sets.iter().map(|s| s.count()).sum();
    Ok(total - union_size(sets)?)
}

/// `C(n, k)` in full precision.
pub fn binomial(n: u64, k: u64) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    use num_traits::{One, Zero};
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C(n, k)` as u64; panics on overflow (callers stay in desk-scale ranges).
pub fn binomial_u64(n: u64, k: u64) -> u64 {
    use num_traits::ToPrimitive;
    binomial(n, k).to_u64().expect("binomial overflow")
}

/// All k-subsets of the support of `set`, as bit vectors over the same
/// universe, in colexicographic order.
pub fn k_subsets_of(set: &BitSet, k: usize) -> Vec<BitSet> {
    use itertools::Itertools;
    let verts = set.to_vec();
    if k > verts.len() {
        return Vec::new();
    }
    let n = set.universe_size();
    let mut out: Vec<BitSet> = verts
        .iter()
        .copied()
        .combinations(k)
        .map(|c| BitSet::from_slice(n, &c))
        .collect();
    out.sort();
    out
}
