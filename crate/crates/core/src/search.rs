//! Exact extremal values at small n by branch-and-bound, with an independent
//! brute-force oracle for cross-validation.

use crate::error::{HxError, Result};
use crate::hypergraph::{binomial, binomial_u64, k_subsets_of, Hypergraph};
use crate::properties;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchKind {
    Cancellative { t: usize },
    UnionFree { t: usize },
    CoverFree { t: usize },
    MatchingBounded { nu_max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofStatus {
    Proved,
    BudgetStopped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchProblem {
    pub kind: SearchKind,
    pub n: usize,
    pub r: usize,
    /// Node expansion budget; None = unlimited.
    pub node_budget: Option<u64>,
    /// Cap on C(n,r); guards against accidentally huge instances.
    pub candidate_limit: u64,
}

impl SearchProblem {
    pub fn new(kind: SearchKind, n: usize, r: usize) -> Self {
        SearchProblem { kind, n, r, node_budget: None, candidate_limit: 64 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    pub optimum: usize,
    pub witness: Hypergraph,
    pub nodes: u64,
    pub status: ProofStatus,
}

fn validate(p: &SearchProblem) -> Result<()> {
    if p.r == 0 || p.n < p.r {
        return Err(HxError::BadParameters(format!("need 1 <= r <= n (got n={}, r={})", p.n, p.r)));
    }
    match p.kind {
        SearchKind::Cancellative { t } | SearchKind::UnionFree { t } | SearchKind::CoverFree { t } => {
            if t == 0 {
                return Err(HxError::BadParameters("t must be >= 1".into()));
            }
        }
        SearchKind::MatchingBounded { .. } => {}
    }
    Ok(())
}

fn candidate_edges(n: usize, r: usize, limit: u64) -> Result<Vec<crate::bitset::BitSet>> {
    let count = binomial(n as u64, r as u64);
    let count_u128 = count.to_u128().unwrap_or(u128::MAX);
    if count_u128 > limit as u128 {
        return Err(HxError::TooManyCandidates { candidates: count_u128, limit: limit as u128 });
    }
    let mut full = crate::bitset::BitSet::new(n);
    for v in 0..n {
        full.insert(v);
    }
    Ok(k_subsets_of(&full, r))
}

/// Does the family (given as sorted edge bit vectors) satisfy the property?
fn feasible(kind: SearchKind, edges: &[crate::bitset::BitSet], n: usize, r: usize) -> Result<bool> {
    let h = Hypergraph::from_edge_sets(edges.to_vec(), n, r)?;
    Ok(match kind {
        SearchKind::Cancellative { t } => properties::is_t_cancellative(&h, t)?.holds,
        SearchKind::UnionFree { t } => properties::is_t_union_free(&h, t)?.holds,
        SearchKind::CoverFree { t } => properties::is_t_cover_free(&h, t)?.holds,
        SearchKind::MatchingBounded { nu_max } => properties::matching_number(&h) <= nu_max,
    })
}

struct BnB {
    kind: SearchKind,
    n: usize,
    r: usize,
    cands: Vec<crate::bitset::BitSet>,
    /// depth-1 symmetry: for each intersection size with the first edge, the
    /// smallest candidate index realizing it
    depth1_reps: HashMap<usize, usize>,
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    stopped: bool,
}

impl BnB {
    /// DFS over "choose the next included edge in colex order". All four
    /// properties are hereditary under edge deletion, so an infeasible
    /// extension can be pruned permanently. Symmetry: the candidate set is
    /// the complete r-graph, and all properties are isomorphism-invariant,
    /// so the first edge is forced to the colex-smallest candidate, and the
    /// second is taken up to relabelings fixing the first edge setwise —
    /// i.e. one representative per intersection size with the first edge
    /// (the colex-smallest of each class; relabeling any optimum to make its
    /// second edge class-minimal cannot push another edge below it).
    fn run(&mut self, cur: &mut Vec<usize>, start: usize) -> Result<()> {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                self.stopped = true;
                return Ok(());
            }
        }
        if cur.len() > self.best.len() {
            self.best = cur.clone();
        }
        for i in start..self.cands.len() {
            if self.stopped {
                return Ok(());
            }
            // bound: even taking every remaining candidate cannot beat best
            if cur.len() + (self.cands.len() - i) <= self.best.len() {
                break;
            }
            if cur.is_empty() && i > 0 {
                break; // first edge forced to the colex-smallest candidate
            }
            if cur.len() == 1 && cur[0] == 0 {
                let class = self.cands[i].intersection_count(&self.cands[0]);
                if self.depth1_reps.get(&class) != Some(&i) {
                    continue;
                }
            }
            cur.push(i);
            let edges: Vec<crate::bitset::BitSet> =
                cur.iter().map(|&j| self.cands[j].clone()).collect();
            if feasible(self.kind, &edges, self.n, self.r)? {
                self.run(cur, i + 1)?;
            }
            cur.pop();
        }
        Ok(())
    }
}

pub fn extremal_search(p: &SearchProblem) -> Result<SearchResult> {
    validate(p)?;
    let cands = candidate_edges(p.n, p.r, p.candidate_limit)?;
    let mut depth1_reps = HashMap::new();
    for (i, c) in cands.iter().enumerate().skip(1) {
        depth1_reps
            .entry(c.intersection_count(&cands[0]))
            .or_insert(i);
    }
    let mut bnb = BnB {
        kind: p.kind,
        n: p.n,
        r: p.r,
        cands,
        depth1_reps,
        best: Vec::new(),
        nodes: 0,
        budget: p.node_budget,
        stopped: false,
    };
    bnb.run(&mut Vec::new(), 0)?;
    let edges: Vec<crate::bitset::BitSet> =
        bnb.best.iter().map(|&j| bnb.cands[j].clone()).collect();
    let witness = Hypergraph::from_edge_sets(edges, p.n, p.r)?;
    Ok(SearchResult {
        optimum: witness.len(),
        witness,
        nodes: bnb.nodes,
        status: if bnb.stopped { ProofStatus::BudgetStopped } else { ProofStatus::Proved },
    })
}

/// Independent oracle: plain next-edge enumeration of every feasible edge
/// subset (extensions of infeasible sets are skipped — all properties are
/// hereditary), no bounds, no symmetry reduction.
pub fn brute_force_oracle(p: &SearchProblem) -> Result<usize> {
    validate(p)?;
    let cands = candidate_edges(p.n, p.r, p.candidate_limit.min(24))?;
    let mut best = 0usize;
    let mut cur: Vec<crate::bitset::BitSet> = Vec::new();
    oracle_rec(p.kind, p.n, p.r, &cands, 0, &mut cur, &mut best)?;
    Ok(best)
}

fn oracle_rec(
    kind: SearchKind,
    n: usize,
    r: usize,
    cands: &[crate::bitset::BitSet],
    start: usize,
    cur: &mut Vec<crate::bitset::BitSet>,
    best: &mut usize,
) -> Result<()> {
    if cur.len() > *best {
        *best = cur.len();
    }
    for i in start..cands.len() {
        cur.push(cands[i].clone());
        if feasible(kind, cur, n, r)? {
            oracle_rec(kind, n, r, cands, i + 1, cur, best)?;
        }
        cur.pop();
    }
    Ok(())
}

/// One row of the matching-extremal table: the searched value of
/// m((t−1)k, k, t−2) against the closed-form C((t−1)k−1, k).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchingTableRow {
    pub t: usize,
    pub n: usize,
    pub k: usize,
    pub nu_max: usize,
    pub formula: u64,
    pub searched: usize,
}

pub fn erdos_matching_table(k: usize, t_max: usize) -> Result<Vec<MatchingTableRow>> {
    if k < 2 || t_max < 2 {
        return Err(HxError::BadParameters("need k >= 2 and t_max >= 2".into()));
    }
    let mut rows = Vec::new();
    for t in 2..=t_max {
        let n = (t - 1) * k;
        let nu_max = t - 2;
        let formula = binomial_u64((n - 1) as u64, k as u64);
        let problem = SearchProblem::new(SearchKind::MatchingBounded { nu_max }, n, k);
        let result = extremal_search(&problem)?;
        rows.push(MatchingTableRow { t, n, k, nu_max, formula, searched: result.optimum });
    }
    Ok(rows)
}
