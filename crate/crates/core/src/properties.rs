//! Decision procedures with witnesses for the hypergraph properties the
//! library works with, plus degree and matching statistics.
//!
//! Every checker returns a [`PropertyWitness`]: `holds == false` iff a
//! violating tuple is attached, and replaying the witness through the
//! defining inequality reproduces the violation.

use crate::bitset::BitSet;
use crate::error::{HxError, Result};
use crate::hypergraph::{binomial, binomial_u64, k_subsets_of, Hypergraph};
use crate::packing::PackingRecord;
use itertools::Itertools;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    Cancellative { t: usize },
    UnionFree { t: usize },
    CoverFree { t: usize },
    VeFree { v: usize, e: usize },
    EllMinusFree { k: usize, ell: usize },
    InducedPacking,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessData {
    /// Violating edge indices. For cancellative: `[A_1..A_t, B, C]`;
    /// for cover-free: `[A_1..A_t, B]`; for (v,e)-free: the e-tuple.
    Edges(Vec<usize>),
    /// The two distinct subfamilies with equal unions.
    Subfamilies { a: Vec<usize>, b: Vec<usize> },
    /// Two packing copies violating the induced condition.
    Copies { i: usize, j: usize, shared: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyWitness {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<WitnessData>,
}

impl PropertyWitness {
    fn ok(property: Property) -> Self {
        PropertyWitness { property, holds: true, witness: None }
    }

    fn violated(property: Property, witness: WitnessData) -> Self {
        PropertyWitness { property, holds: false, witness: Some(witness) }
    }
}

/// Searches for at most `t` edges (excluding `banned`) whose union covers
/// `target`. Candidates are re-ranked by overlap at every level; a branch is
/// pruned when even the `t` largest remaining overlaps cannot cover what is
/// left.
pub(crate) fn find_cover(
    target: &BitSet,
    edges: &[BitSet],
    banned: &[usize],
    t: usize,
) -> Option<Vec<usize>> {
    let cands: Vec<usize> = (0..edges.len())
        .filter(|i| !banned.contains(i) && edges[*i].intersects(target))
        .collect();
    let mut chosen = Vec::new();
    if cover_rec(target.clone(), &cands, edges, t, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

fn cover_rec(
    remaining: BitSet,
    cands: &[usize],
    edges: &[BitSet],
    t_left: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if remaining.is_empty() {
        return true;
    }
    if t_left == 0 {
        return false;
    }
    let mut scored: Vec<(usize, usize)> = cands
        .iter()
        .map(|&i| (edges[i].intersection_count(&remaining), i))
        .filter(|&(ov, _)| ov > 0)
        .collect();
    scored.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let best_possible: usize = scored.iter().take(t_left).map(|&(ov, _)| ov).sum();
    if best_possible < remaining.count() {
        return false;
    }
    for (pos, &(_, i)) in scored.iter().enumerate() {
        chosen.push(i);
        let next = remaining.difference(&edges[i]);
        let rest: Vec<usize> = scored[pos + 1..].iter().map(|&(_, j)| j).collect();
        if cover_rec(next, &rest, edges, t_left - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Pads a partial cover up to exactly `t` distinct edges, avoiding `banned`.
fn pad_cover(mut cover: Vec<usize>, num_edges: usize, banned: &[usize], t: usize) -> Vec<usize> {
    for i in 0..num_edges {
        if cover.len() >= t {
            break;
        }
        if !cover.contains(&i) && !banned.contains(&i) {
            cover.push(i);
        }
    }
    cover
}

/// `t`-cancellative: no `BΔC` of two distinct edges is covered by the union
/// of `t` other distinct edges. Vacuously true when `|H| < t+2`.
pub fn is_t_cancellative(h: &Hypergraph, t: usize) -> Result<PropertyWitness> {
    if h.r() == 0 {
        return Err(HxError::UniformityZero);
    }
    if t == 0 {
        return Err(HxError::BadParameters("t must be >= 1".into()));
    }
    let property = Property::Cancellative { t };
    let m = h.len();
    if m < t + 2 {
        return Ok(PropertyWitness::ok(property));
    }
    for b in 0..m {
        for c in b + 1..m {
            let diff = h.edge(b).symmetric_difference(h.edge(c));
            if let Some(cover) = find_cover(&diff, h.edges(), &[b, c], t) {
                let mut w = pad_cover(cover, m, &[b, c], t);
                w.push(b);
                w.push(c);
                return Ok(PropertyWitness::violated(property, WitnessData::Edges(w)));
            }
        }
    }
    Ok(PropertyWitness::ok(property))
}

pub const DEFAULT_MAX_UNIONS: usize = 2_000_000;

/// `t`-union-free: no two distinct subfamilies of at most `t` edges each have
/// equal unions. Subfamilies are unordered edge sets; proper containment with
/// equal unions counts as a violation.
pub fn is_t_union_free(h: &Hypergraph, t: usize) -> Result<PropertyWitness> {
    is_t_union_free_capped(h, t, DEFAULT_MAX_UNIONS)
}

/// As [`is_t_union_free`] but aborts with a clear error instead of exhausting
/// memory once the union map would exceed `max_unions` entries.
pub fn is_t_union_free_capped(
    h: &Hypergraph,
    t: usize,
    max_unions: usize,
) -> Result<PropertyWitness> {
    if t == 0 {
        return Err(HxError::BadParameters("t must be >= 1".into()));
    }
    let property = Property::UnionFree { t };
    let mut seen: HashMap<BitSet, Vec<usize>> = HashMap::new();
    for size in 1..=t.min(h.len()) {
        for combo in (0..h.len()).combinations(size) {
            let mut u = h.edge(combo[0]).clone();
            for &i in &combo[1..] {
                u.union_with(h.edge(i));
            }
            if let Some(prev) = seen.get(&u) {
                return Ok(PropertyWitness::violated(
                    property,
                    WitnessData::Subfamilies { a: prev.clone(), b: combo },
                ));
            }
            if seen.len() >= max_unions {
                return Err(HxError::MaxUnionsExceeded(max_unions));
            }
            seen.insert(u, combo);
        }
    }
    Ok(PropertyWitness::ok(property))
}

/// `t`-cover-free: no edge is contained in the union of `t` other edges.
pub fn is_t_cover_free(h: &Hypergraph, t: usize) -> Result<PropertyWitness> {
    if t == 0 {
        return Err(HxError::BadParameters("t must be >= 1".into()));
    }
    let property = Property::CoverFree { t };
    let m = h.len();
    if m < t + 1 {
        return Ok(PropertyWitness::ok(property));
    }
    for b in 0..m {
        if let Some(cover) = find_cover(h.edge(b), h.edges(), &[b], t) {
            let mut w = pad_cover(cover, m, &[b], t);
            w.push(b);
            return Ok(PropertyWitness::violated(property, WitnessData::Edges(w)));
        }
    }
    Ok(PropertyWitness::ok(property))
}

/// `(v,e)`-free: every `e` distinct edges span at least `v+1` vertices.
pub fn is_ve_free(h: &Hypergraph, v: usize, e: usize) -> Result<PropertyWitness> {
    if e < 2 {
        return Err(HxError::BadParameters("e must be >= 2".into()));
    }
    if v < h.r() {
        return Err(HxError::BadParameters(format!("v = {v} < r = {}", h.r())));
    }
    let property = Property::VeFree { v, e };
    let mut chosen = Vec::new();
    if ve_rec(h, v, e, 0, None, &mut chosen) {
        return Ok(PropertyWitness::violated(property, WitnessData::Edges(chosen)));
    }
    Ok(PropertyWitness::ok(property))
}

// DFS over index-ordered e-tuples; unions only grow, so a partial union
// already exceeding v prunes the branch.
fn ve_rec(
    h: &Hypergraph,
    v: usize,
    e: usize,
    start: usize,
    union: Option<BitSet>,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == e {
        return true;
    }
    let needed = e - chosen.len();
    if h.len() - start < needed {
        return false;
    }
    for i in start..h.len() {
        let next_union = match &union {
            None => h.edge(i).clone(),
            Some(u) => u.union(h.edge(i)),
        };
        if next_union.count() > v {
            continue;
        }
        chosen.push(i);
        if ve_rec(h, v, e, i + 1, Some(next_union), chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// `ℓ⁻`-free for shadow size `k`: `(ℓr − (ℓ−1)k − 1, ℓ)`-free.
pub fn is_ell_minus_free(h: &Hypergraph, k: usize, ell: usize) -> Result<PropertyWitness> {
    if ell < 2 || k == 0 || k >= h.r() {
        return Err(HxError::BadParameters(format!(
            "need ell >= 2 and 0 < k < r (got ell={ell}, k={k}, r={})",
            h.r()
        )));
    }
    let v = ell * h.r() - (ell - 1) * k - 1;
    let mut w = is_ve_free(h, v, ell)?;
    w.property = Property::EllMinusFree { k, ell };
    Ok(w)
}

/// Exact matching number by branch and bound over index-ordered edge sets.
pub fn matching_number(h: &Hypergraph) -> usize {
    // greedy lower bound in colex order
    let mut used = BitSet::new(h.n());
    let mut greedy = 0usize;
    for e in h.edges() {
        if !e.intersects(&used) {
            used.union_with(e);
            greedy += 1;
        }
    }
    let mut best = greedy;
    matching_rec(h, 0, &BitSet::new(h.n()), 0, &mut best);
    best
}

fn matching_rec(h: &Hypergraph, start: usize, used: &BitSet, count: usize, best: &mut usize) {
    if count > *best {
        *best = count;
    }
    if start >= h.len() {
        return;
    }
    // remaining-vertex and remaining-edge bounds
    let free = h.n() - used.count();
    let cap = count + (free / h.r()).min(h.len() - start);
    if cap <= *best {
        return;
    }
    for i in start..h.len() {
        let e = h.edge(i);
        if !e.intersects(used) {
            matching_rec(h, i + 1, &used.union(e), count + 1, best);
        }
    }
}

/// Histogram `s ↦ |D(F, s)|` of k-set degrees, for `s ≥ 1`; the `s = 0`
/// entry is derived as `C(n,k) − Σ_{s≥1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSpectrum {
    pub k: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl DegreeSpectrum {
    /// `Σ_{s≥1} s·counts[s]`; equals `C(r,k)·|F|` for every hypergraph.
    pub fn weighted_sum(&self) -> u128 {
        self.counts.iter().map(|(&s, &c)| s as u128 * c as u128).sum()
    }

    pub fn nonzero_total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count_at_least(&self, s_min: usize) -> u64 {
        self.counts.iter().filter(|(&s, _)| s >= s_min).map(|(_, &c)| c).sum()
    }

    pub fn zero_count(&self, n: usize) -> BigUint {
        binomial(n as u64, self.k as u64) - BigUint::from(self.nonzero_total())
    }
}

fn degree_map(h: &Hypergraph, k: usize) -> HashMap<BitSet, u64> {
    let mut deg: HashMap<BitSet, u64> = HashMap::new();
    for e in h.edges() {
        for t in k_subsets_of(e, k) {
            *deg.entry(t).or_insert(0) += 1;
        }
    }
    deg
}

pub fn degree_spectrum(h: &Hypergraph, k: usize) -> Result<DegreeSpectrum> {
    if k == 0 || k > h.r() {
        return Err(HxError::BadParameters(format!("need 1 <= k <= r, got k={k}")));
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for (_, d) in degree_map(h, k) {
        *counts.entry(d as usize).or_insert(0) += 1;
    }
    Ok(DegreeSpectrum { k, counts })
}

/// The identity `C(r,k)·|F| == Σ_{s≥1} s·|D(F,s)|`, exact.
pub fn degree_identity_holds(h: &Hypergraph, k: usize) -> Result<bool> {
    let spec = degree_spectrum(h, k)?;
    let lhs = binomial_u64(h.r() as u64, k as u64) as u128 * h.len() as u128;
    Ok(lhs == spec.weighted_sum())
}

/// All `T ∈ C(X,k)` with `deg_H(T) ≥ s_min`, in colex order.
pub fn restricted_degree_sets(
    h: &Hypergraph,
    x: &BitSet,
    k: usize,
    s_min: usize,
) -> Result<Vec<BitSet>> {
    if k == 0 || k > h.r() {
        return Err(HxError::BadParameters(format!("need 1 <= k <= r, got k={k}")));
    }
    let mut out = Vec::new();
    for t in k_subsets_of(x, k) {
        let deg = h.edges().iter().filter(|e| t.is_subset(e)).count();
        if deg >= s_min {
            out.push(t);
        }
    }
    Ok(out)
}

/// Induced packing: copies pairwise edge-disjoint; any two vertex sets share
/// at most `k` vertices; a shared k-set is never an edge of either copy.
pub fn is_induced_packing(p: &PackingRecord, k: usize) -> Result<PropertyWitness> {
    let property = Property::InducedPacking;
    if p.copies.is_empty() {
        return Err(HxError::BadParameters("empty packing".into()));
    }
    for copy in &p.copies {
        if copy.edges.iter().any(|e| e.count() != k) {
            return Err(HxError::NonuniformPacking);
        }
    }
    for i in 0..p.copies.len() {
        for j in i + 1..p.copies.len() {
            let a = &p.copies[i];
            let b = &p.copies[j];
            if let Some(shared_edge) = a.edges.iter().find(|e| b.edges.contains(e)) {
                return Ok(PropertyWitness::violated(
                    property,
                    WitnessData::Copies { i, j, shared: shared_edge.to_vec() },
                ));
            }
            let inter = a.vertices.intersection(&b.vertices);
            let ic = inter.count();
            if ic > k
                || (ic == k && (a.edges.contains(&inter) || b.edges.contains(&inter)))
            {
                return Ok(PropertyWitness::violated(
                    property,
                    WitnessData::Copies { i, j, shared: inter.to_vec() },
                ));
            }
        }
    }
    Ok(PropertyWitness::ok(property))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;

    fn hg(edges: &[&[usize]], n: usize, r: usize) -> Hypergraph {
        let raw: Vec<Vec<usize>> = edges.iter().map(|e| e.to_vec()).collect();
        Hypergraph::canonicalize(&raw, n, r).unwrap()
    }

    #[test]
    fn k3_is_not_1_cancellative() {
        let k3 = hg(&[&[0, 1], &[0, 2], &[1, 2]], 3, 2);
        let w = is_t_cancellative(&k3, 1).unwrap();
        assert!(!w.holds);
        // replay: BΔC ⊆ A
        if let Some(WitnessData::Edges(idx)) = w.witness {
            let (a, b, c) = (&idx[0], &idx[1], &idx[2]);
            let diff = k3.edge(*b).symmetric_difference(k3.edge(*c));
            assert!(diff.is_subset(k3.edge(*a)));
        } else {
            panic!("expected edge witness");
        }
    }

    #[test]
    fn single_edge_is_cancellative_for_any_t() {
        let h = hg(&[&[0, 1, 2]], 5, 3);
        for t in 1..5 {
            assert!(is_t_cancellative(&h, t).unwrap().holds);
        }
    }

    #[test]
    fn complete_bipartite_is_1_cancellative() {
        // parts {0,1} and {2,3}
        let h = hg(&[&[0, 2], &[0, 3], &[1, 2], &[1, 3]], 4, 2);
        assert!(is_t_cancellative(&h, 1).unwrap().holds);
    }

    #[test]
    fn union_free_violation_c4() {
        let h = hg(&[&[0, 1], &[2, 3], &[0, 2], &[1, 3]], 4, 2);
        let w = is_t_union_free(&h, 2).unwrap();
        assert!(!w.holds);
        if let Some(WitnessData::Subfamilies { a, b }) = w.witness {
            let ua: Vec<_> = a.iter().fold(BitSet::new(4), |acc, &i| acc.union(h.edge(i))).to_vec();
            let ub: Vec<_> = b.iter().fold(BitSet::new(4), |acc, &i| acc.union(h.edge(i))).to_vec();
            assert_eq!(ua, ub);
            assert_ne!(a, b);
        } else {
            panic!("expected subfamily witness");
        }
    }

    #[test]
    fn perfect_matching_is_union_free() {
        let edges: Vec<Vec<usize>> = (0..5).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let raw: Vec<&[usize]> = edges.iter().map(|e| e.as_slice()).collect();
        let h = hg(&raw, 10, 2);
        for t in 1..=4 {
            assert!(is_t_union_free(&h, t).unwrap().holds);
        }
    }

    #[test]
    fn cover_free_violation() {
        let h = hg(&[&[0, 1], &[0, 2], &[1, 3]], 4, 2);
        let w = is_t_cover_free(&h, 2).unwrap();
        assert!(!w.holds);
        if let Some(WitnessData::Edges(idx)) = w.witness {
            let b = *idx.last().unwrap();
            let mut u = BitSet::new(4);
            for &i in &idx[..idx.len() - 1] {
                u.union_with(h.edge(i));
            }
            assert!(h.edge(b).is_subset(&u));
        }
        assert!(is_t_cover_free(&hg(&[&[0, 1]], 2, 2), 3).unwrap().holds);
    }

    #[test]
    fn ve_free_examples() {
        let h = hg(&[&[0, 1, 2, 3], &[0, 1, 2, 4]], 8, 4);
        // ell=2, k=2: v = 2*4-2-1 = 5
        let w = is_ell_minus_free(&h, 2, 2).unwrap();
        assert!(!w.holds);
        let disj = hg(&[&[0, 1, 2, 3], &[4, 5, 6, 7]], 8, 4);
        assert!(is_ell_minus_free(&disj, 2, 2).unwrap().holds);
        assert!(is_ve_free(&h, 2, 2).is_err()); // v < r
    }

    #[test]
    fn matching_number_examples() {
        let k3 = hg(&[&[0, 1], &[0, 2], &[1, 2]], 3, 2);
        assert_eq!(matching_number(&k3), 1);
        let m3 = hg(&[&[0, 1], &[2, 3], &[4, 5]], 6, 2);
        assert_eq!(matching_number(&m3), 3);
        // K5 as a 2-graph
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push(vec![i, j]);
            }
        }
        let k5 = Hypergraph::canonicalize(&edges, 5, 2).unwrap();
        assert_eq!(matching_number(&k5), 2);
    }

    #[test]
    fn degree_spectrum_examples() {
        // single tk-edge with t=2, k=2
        let h = hg(&[&[0, 1, 2, 3]], 6, 4);
        let spec = degree_spectrum(&h, 2).unwrap();
        assert_eq!(spec.counts.get(&1), Some(&6)); // C(4,2)
        // two 4-edges sharing exactly 2 vertices
        let h2 = hg(&[&[0, 1, 2, 3], &[2, 3, 4, 5]], 6, 4);
        let spec2 = degree_spectrum(&h2, 2).unwrap();
        assert_eq!(spec2.counts.get(&2), Some(&1));
        assert_eq!(spec2.counts.get(&1), Some(&10));
        assert!(degree_identity_holds(&h2, 2).unwrap());
    }

    #[test]
    fn restricted_degree_sets_example() {
        let h = hg(&[&[0, 1, 2, 3], &[2, 3, 4, 5]], 6, 4);
        let x = BitSet::from_slice(6, &[2, 3, 4]);
        let hot = restricted_degree_sets(&h, &x, 2, 2).unwrap();
        assert_eq!(hot.len(), 1);
        assert_eq!(hot[0].to_vec(), vec![2, 3]);
    }
}
