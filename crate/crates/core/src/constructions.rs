//! Lower-bound constructions: randomized ℓ⁻-free generation by the deletion
//! method, the private-vertex lift, k-shadows, and the end-to-end pipelines
//! that assemble a large cancellative or union-free family from an induced
//! packing of shadow copies.

use crate::error::{HxError, Result};
use crate::hypergraph::{binomial, binomial_u64, k_subsets_of, Hypergraph};
use crate::packing::{
    self, default_epsilon, greedy_conflict_free_packing, strict_overlap_cap, ConflictMode,
    PackingRecord, PackingStats, Strategy,
};
use crate::properties;
use crate::rng::{keyed_hash, seed_substream};
use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Candidate-set cap for the deletion-method generator and the shadow stage.
const MAX_CANDIDATE_SETS: u64 = 2_000_000;

/// Parameters of the construction pipelines. `t, k, n, seed` are required;
/// everything else has proof-side defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub t: usize,
    pub k: usize,
    /// Ground-set size of the base graph 𝓖; chosen from pilot runs when None.
    pub m0: Option<usize>,
    /// Slack of the m0-selection criterion, in (0,1).
    pub epsilon: f64,
    pub n: usize,
    pub seed: u64,
    pub strategy: Strategy,
    /// Red probability of the k-set coloring; default 1/(4(m−k)).
    pub coloring_epsilon: Option<f64>,
    /// Sampling budget of the packing greedy.
    pub budget: u64,
    /// Copy target of the packing greedy; default C(n,k)/|𝓙|.
    pub target_copies: Option<usize>,
    /// Forced conflict mode; default Exact at desk scale, StrictOverlap above.
    pub conflict_mode: Option<ConflictMode>,
    /// Attempts per randomized stage.
    pub retries: u32,
    /// Largest |𝓗| that is verified by full enumeration; above it the
    /// pipeline verifies the sufficient conditions and samples tuples.
    pub exhaustive_edge_budget: usize,
}

impl ConstructionParams {
    pub fn new(t: usize, k: usize, n: usize, seed: u64) -> Self {
        ConstructionParams {
            t,
            k,
            m0: None,
            epsilon: 0.5,
            n,
            seed,
            strategy: Strategy::DirectGreedy,
            coloring_epsilon: None,
            budget: 20_000,
            target_copies: None,
            conflict_mode: None,
            retries: 5,
            exhaustive_edge_budget: 200,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageSizes {
    pub g: usize,
    pub f: usize,
    pub shadow: usize,
    pub copies: usize,
    pub h: usize,
}

/// One recorded verification outcome; `method` says how the verdict was
/// obtained (full enumeration, a structural argument, or sampling).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub name: String,
    pub holds: bool,
    pub method: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub mode: String,
    pub t: usize,
    pub k: usize,
    pub e: usize,
    pub m0: usize,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub c_hat: Option<f64>,
    pub sizes: StageSizes,
    pub density_numer: String,
    pub density_denom: String,
    pub density_value: f64,
    pub coloring_epsilon: f64,
    /// Whether the coloring ε sits inside the proof-side range (0, 1/(2(m−k))).
    pub coloring_epsilon_in_proof_range: bool,
    pub conflict_mode: String,
    pub generator_attempts: u32,
    pub generator_met_floor: bool,
    pub packing_stats: Option<PackingStats>,
    pub verdicts: Vec<VerdictRecord>,
    pub flags: Vec<String>,
}

impl PipelineReport {
    pub fn all_verdicts_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

/// Outcome of the deletion-method generator, including whether the survivor
/// floor was met (the graph is ℓ⁻-free either way).
#[derive(Clone, Debug)]
pub struct GeneratorOutcome {
    pub graph: Hypergraph,
    pub attempts: u32,
    pub met_floor: bool,
    pub sample_probability: f64,
    pub floor: usize,
}

/// Deletion method: sample each r-set of `[m]` independently with probability
/// `p = ½·m^{k+1/(e−1)−r}`, then, for ℓ = 2,…,e ascending, delete the
/// colex-largest edge of each violating ℓ-tuple. The survivor is ℓ⁻-free for
/// every 2 ≤ ℓ ≤ e by construction; if it has fewer than `⌈p·C(m,r)/4⌉`
/// edges the attempt is retried on a fresh seed substream.
pub fn random_ell_minus_free(m: usize, r: usize, k: usize, e: usize, seed: u64) -> Result<Hypergraph> {
    let out = random_ell_minus_free_detailed(m, r, k, e, seed, 5)?;
    if !out.met_floor {
        return Err(HxError::RetriesExhausted {
            attempts: out.attempts,
            best_edges: out.graph.len(),
        });
    }
    Ok(out.graph)
}

pub fn random_ell_minus_free_detailed(
    m: usize,
    r: usize,
    k: usize,
    e: usize,
    seed: u64,
    retries: u32,
) -> Result<GeneratorOutcome> {
    if !(k >= 2 && r > k && e >= 2 && m >= r) {
        return Err(HxError::BadParameters(format!(
            "need r > k >= 2, e >= 2, m >= r (got m={m}, r={r}, k={k}, e={e})"
        )));
    }
    if retries == 0 {
        return Err(HxError::BadParameters("retries must be >= 1".into()));
    }
    let total = binomial(m as u64, r as u64);
    let total = total
        .to_u64()
        .filter(|&c| c <= MAX_CANDIDATE_SETS)
        .ok_or_else(|| {
            HxError::BadParameters(format!("C({m},{r}) exceeds the generator cap"))
        })?;
    let exponent = k as f64 + 1.0 / (e as f64 - 1.0) - r as f64;
    let p = (0.5 * (m as f64).powf(exponent)).min(1.0);
    let floor = ((p * total as f64 / 4.0).ceil() as usize).max(1);

    let mut best: Option<Hypergraph> = None;
    for attempt in 1..=retries {
        let label = format!("attempt-{attempt}");
        let mut rng = seed_substream(seed, &["ell-free-generator", &label]);
        let mut edges: Vec<crate::bitset::BitSet> = (0..m)
            .combinations(r)
            .filter(|_| rng.gen::<f64>() < p)
            .map(|c| crate::bitset::BitSet::from_slice(m, &c))
            .collect();
        edges.sort();
        // ascending ℓ cleanup; removing an edge never creates violations
        for ell in 2..=e {
            while let Some(tuple) = find_connected_ell_violation(&edges, k, ell) {
                // colex-largest edge of the tuple = largest index (edges sorted)
                let victim = *tuple.iter().max().expect("nonempty tuple");
                edges.remove(victim);
            }
        }
        let graph = Hypergraph::from_edge_sets(edges, m, r)?;
        if graph.len() >= floor {
            return Ok(GeneratorOutcome {
                graph,
                attempts: attempt,
                met_floor: true,
                sample_probability: p,
                floor,
            });
        }
        if best.as_ref().map_or(true, |b| graph.len() > b.len()) {
            best = Some(graph);
        }
    }
    Ok(GeneratorOutcome {
        graph: best.expect("at least one attempt ran"),
        attempts: retries,
        met_floor: false,
        sample_probability: p,
        floor,
    })
}

/// Finds ℓ distinct sets with union ≤ ℓ·size − (ℓ−1)k − 1, assuming the
/// family is already ℓ′⁻-free for every 2 ≤ ℓ′ < ℓ. Under that assumption any
/// violating tuple is connected through vertex intersections: a split into
/// vertex-disjoint parts of sizes a+b = ℓ would force one part's union below
/// its own a⁻/b⁻ threshold, because unions of disjoint parts add while the
/// thresholds add up to more than the ℓ-threshold. The DFS therefore roots at
/// the minimum-index member and only extends by sets meeting the current
/// union, which keeps the search near-linear on sparse families.
pub(crate) fn find_connected_ell_violation(
    sets: &[crate::bitset::BitSet],
    k: usize,
    ell: usize,
) -> Option<Vec<usize>> {
    if sets.len() < ell {
        return None;
    }
    let size = sets[0].count();
    let v_max = ell * size - (ell - 1) * k;
    if v_max == 0 {
        return None;
    }
    let v_max = v_max - 1;
    for seed_idx in 0..sets.len() {
        if sets[seed_idx].count() > v_max {
            continue;
        }
        let mut chosen = vec![seed_idx];
        if connected_rec(sets, seed_idx, &sets[seed_idx].clone(), v_max, ell - 1, &mut chosen) {
            chosen.sort_unstable();
            return Some(chosen);
        }
    }
    None
}

fn connected_rec(
    sets: &[crate::bitset::BitSet],
    seed_idx: usize,
    union: &crate::bitset::BitSet,
    v_max: usize,
    need: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if need == 0 {
        return true;
    }
    for j in seed_idx + 1..sets.len() {
        if chosen.contains(&j) || !sets[j].intersects(union) {
            continue;
        }
        let next = union.union(&sets[j]);
        if next.count() > v_max {
            continue;
        }
        chosen.push(j);
        if connected_rec(sets, seed_idx, &next, v_max, need - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Extends edge `i` of `G` (in canonical order) by the fresh vertex `m0 + i`.
/// Each fresh vertex has degree exactly 1, so every lifted edge owns a
/// private vertex.
pub fn lift_to_f(g: &Hypergraph) -> Result<Hypergraph> {
    let m0 = g.n();
    let n_new = m0 + g.len();
    let r_new = g.r() + 1;
    let edges: Vec<crate::bitset::BitSet> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut lifted = crate::bitset::BitSet::new(n_new);
            for v in e.iter() {
                lifted.insert(v);
            }
            lifted.insert(m0 + i);
            lifted
        })
        .collect();
    Hypergraph::from_edge_sets(edges, n_new, r_new)
}

/// All k-subsets of edges of `F`, deduplicated and canonical.
pub fn k_shadow(f: &Hypergraph, k: usize) -> Result<Hypergraph> {
    if k == 0 || k > f.r() {
        return Err(HxError::BadParameters(format!(
            "shadow size k={k} must satisfy 1 <= k <= r={}",
            f.r()
        )));
    }
    let mut shadow: Vec<crate::bitset::BitSet> = Vec::new();
    for edge in f.edges() {
        shadow.extend(k_subsets_of(edge, k));
    }
    shadow.sort();
    shadow.dedup();
    Hypergraph::from_edge_sets(shadow, f.n(), k)
}

/// Smallest m0 with
/// `1/(c_hat⁻¹·m0^{−1/(2t−1)} + C(tk−1,k−1)) ≥ (1−ε/2)/C(tk−1,k−1)`.
/// The left side is increasing in m0, so an integer scan upward from the
/// closed-form floor finds the optimum.
pub fn choose_m0(t: usize, k: usize, epsilon: f64, c_hat: f64) -> Result<usize> {
    if t < 2 || k < 2 {
        return Err(HxError::BadParameters("need t >= 2 and k >= 2".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || !(c_hat > 0.0) || !c_hat.is_finite() {
        return Err(HxError::BadParameters(
            "need epsilon in (0,1) and c_hat > 0".into(),
        ));
    }
    let b = binomial_u64((t * k - 1) as u64, (k - 1) as u64) as f64;
    let exponent = 2 * t - 1;
    let satisfies = |m0: usize| {
        let lhs = 1.0 / (c_hat.recip() * (m0 as f64).powf(-1.0 / exponent as f64) + b);
        lhs >= (1.0 - epsilon / 2.0) / b
    };
    // the inequality rearranges to m0^{-1/(2t-1)} <= c_hat·B·ε/(2−ε)
    let q = c_hat * b * epsilon / (2.0 - epsilon);
    let start = if q >= 1.0 {
        1usize
    } else {
        let raw = q.powi(-(exponent as i32));
        if !raw.is_finite() || raw > 5.0e7 {
            return Err(HxError::BadParameters(
                "epsilon/c_hat combination requires an impractically large m0".into(),
            ));
        }
        (raw.floor() as usize).max(1)
    };
    let mut m0 = start.saturating_sub(2).max(1);
    while !satisfies(m0) {
        m0 += 1;
        if m0 > 100_000_000 {
            return Err(HxError::BadParameters("m0 scan did not terminate".into()));
        }
    }
    Ok(m0)
}

/// Empirical estimate of the generator's density constant: the mean of
/// `|𝓖|/m^{k+1/(e−1)}` over pilot runs at a moderate m.
pub fn estimate_c_hat(t: usize, k: usize, e: usize, seed: u64) -> Result<f64> {
    let r = t * k - 1;
    let mut m = 2 * t * k + 4;
    while binomial(m as u64, r as u64) > num_bigint::BigUint::from(100_000u64) && m > r + 1 {
        m -= 1;
    }
    let mut sum = 0.0;
    let pilots = 3;
    for i in 0..pilots {
        let out = random_ell_minus_free_detailed(m, r, k, e, keyed_hash(seed, &["pilot", &i.to_string()]), 5)?;
        sum += out.graph.len() as f64 / (m as f64).powf(k as f64 + 1.0 / (e as f64 - 1.0));
    }
    Ok((sum / pilots as f64).max(1e-6))
}

/// Transports `F` along each recorded bijection and unions the copies. The
/// copies must be exact shadow images and pairwise edge-disjoint as r-graphs.
pub fn assemble_hf(f: &Hypergraph, p: &PackingRecord) -> Result<Hypergraph> {
    let shadow = k_shadow(f, p.k)?;
    packing::verify_bijections(p, &shadow)?;
    let mut edges = Vec::with_capacity(p.copies.len() * f.len());
    for copy in &p.copies {
        if copy.bijection.len() != f.n() {
            return Err(HxError::ShadowMismatch { copy: 0 });
        }
        for e in f.edges() {
            let mut img = crate::bitset::BitSet::new(p.n);
            for v in e.iter() {
                img.insert(copy.bijection[v]);
            }
            edges.push(img);
        }
    }
    let h = Hypergraph::from_edge_sets(edges, p.n, f.r())?;
    if h.len() != p.copies.len() * f.len() {
        return Err(HxError::HypothesisFailed(
            "copies of F are not pairwise edge-disjoint as r-graphs".into(),
        ));
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Cancellative,
    UnionFree,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Cancellative => "cancellative",
            Mode::UnionFree => "union-free",
        }
    }
    fn horizon(self, t: usize) -> usize {
        match self {
            Mode::Cancellative => 2 * t,
            Mode::UnionFree => 2 * t + 2,
        }
    }
}

/// Every artifact a pipeline run produces, for emission to disk.
#[derive(Clone, Debug)]
pub struct PipelineArtifacts {
    pub g: Hypergraph,
    pub f: Hypergraph,
    pub shadow: Hypergraph,
    pub packing: PackingRecord,
    pub h: Hypergraph,
    pub report: PipelineReport,
}

/// Builds a 2(t−1)-cancellative tk-graph on `[n]` and its audit report.
pub fn build_cancellative(params: &ConstructionParams) -> Result<(Hypergraph, PipelineReport)> {
    let a = build_cancellative_artifacts(params)?;
    Ok((a.h, a.report))
}

/// Builds a t-cover-free, (t+1)-union-free tk-graph on `[n]` and its report.
pub fn build_union_free(params: &ConstructionParams) -> Result<(Hypergraph, PipelineReport)> {
    let a = build_union_free_artifacts(params)?;
    Ok((a.h, a.report))
}

pub fn build_cancellative_artifacts(params: &ConstructionParams) -> Result<PipelineArtifacts> {
    run_pipeline(params, Mode::Cancellative)
}

pub fn build_union_free_artifacts(params: &ConstructionParams) -> Result<PipelineArtifacts> {
    run_pipeline(params, Mode::UnionFree)
}

fn run_pipeline(params: &ConstructionParams, mode: Mode) -> Result<PipelineArtifacts> {
    let (t, k, n, seed) = (params.t, params.k, params.n, params.seed);
    if t < 2 || k < 2 {
        return Err(HxError::BadParameters("need t >= 2 and k >= 2".into()));
    }
    if !(params.epsilon > 0.0 && params.epsilon < 1.0) {
        return Err(HxError::BadParameters("epsilon must be in (0,1)".into()));
    }
    let e = mode.horizon(t);
    let r_g = t * k - 1;
    let mut flags: Vec<String> = Vec::new();
    let mut verdicts: Vec<VerdictRecord> = Vec::new();

    // --- stage 1: ground-set size ---------------------------------------
    let (m0, c_hat) = match params.m0 {
        Some(m0) => {
            if m0 < t * k {
                return Err(HxError::BadParameters(format!("m0 = {m0} < tk = {}", t * k)));
            }
            (m0, None)
        }
        None => {
            let c_hat = estimate_c_hat(t, k, e, seed)?;
            let chosen = choose_m0(t, k, params.epsilon, c_hat)?.max(t * k);
            if binomial(chosen as u64, r_g as u64)
                > num_bigint::BigUint::from(MAX_CANDIDATE_SETS)
            {
                return Err(HxError::BadParameters(format!(
                    "selected m0 = {chosen} makes C(m0, tk-1) exceed the generator cap; \
                     pass an explicit m0 or a larger epsilon"
                )));
            }
            (chosen, Some(c_hat))
        }
    };

    // --- stage 2: ℓ⁻-free base graph and lift ---------------------------
    let gen = random_ell_minus_free_detailed(
        m0,
        r_g,
        k,
        e,
        keyed_hash(seed, &["construct", mode.name(), "generator"]),
        params.retries,
    )?;
    if !gen.met_floor {
        flags.push("generator-floor-not-met".into());
    }
    let g = gen.graph.clone();
    let f = lift_to_f(&g)?;
    let m = f.n();

    // hypothesis (ii): F is ℓ⁻-free for every 2 ≤ ℓ ≤ e
    for ell in 2..=e {
        let w = properties::is_ell_minus_free(&f, k, ell)?;
        verdicts.push(VerdictRecord {
            name: format!("F-ell-free-l{ell}"),
            holds: w.holds,
            method: "exhaustive".into(),
        });
        if !w.holds {
            return Err(HxError::HypothesisFailed(format!(
                "lifted family is not {ell}⁻-free"
            )));
        }
    }
    // fresh-vertex law: each lifted edge owns a private vertex of degree 1
    let fresh_ok = (0..g.len()).all(|i| {
        f.edges().iter().filter(|edge| edge.contains(m0 + i)).count() == 1
    });
    verdicts.push(VerdictRecord {
        name: "fresh-vertex-degree-1".into(),
        holds: fresh_ok,
        method: "exhaustive".into(),
    });
    if !fresh_ok {
        return Err(HxError::HypothesisFailed("a fresh vertex has degree != 1".into()));
    }
    // hypothesis (i) on F: the mode's property, exhaustively at small |F|,
    // otherwise by the private-vertex argument (an edge's private vertex can
    // never be covered by other edges, and distinct subfamilies have distinct
    // private-vertex sets).
    {
        let (name, holds, method) = match mode {
            Mode::Cancellative => {
                let tc = 2 * (t - 1);
                if f.len() <= 12 {
                    let w = properties::is_t_cancellative(&f, tc)?;
                    (format!("F-cancellative-t{tc}"), w.holds, "exhaustive".to_string())
                } else {
                    (format!("F-cancellative-t{tc}"), fresh_ok, "structural-private-vertex".to_string())
                }
            }
            Mode::UnionFree => {
                let tu = t + 1;
                if f.len() <= 12 {
                    let w = properties::is_t_union_free(&f, tu)?;
                    (format!("F-union-free-t{tu}"), w.holds, "exhaustive".to_string())
                } else {
                    (format!("F-union-free-t{tu}"), fresh_ok, "structural-private-vertex".to_string())
                }
            }
        };
        if !holds {
            return Err(HxError::HypothesisFailed(format!("{name} failed on F")));
        }
        verdicts.push(VerdictRecord { name, holds, method });
    }
    if mode == Mode::UnionFree {
        // the union-free composition argument also needs F t-cover-free
        let w = properties::is_t_cover_free(&f, t)?;
        verdicts.push(VerdictRecord {
            name: format!("F-cover-free-t{t}"),
            holds: w.holds,
            method: "exhaustive".into(),
        });
        if !w.holds {
            return Err(HxError::HypothesisFailed("F is not t-cover-free".into()));
        }
    }

    // --- stage 3: shadow template ----------------------------------------
    let shadow = k_shadow(&f, k)?;

    // --- stage 4: induced ℓ⁻-free packing --------------------------------
    let coloring_epsilon = params
        .coloring_epsilon
        .unwrap_or_else(|| default_epsilon(m, k));
    let eps_in_range = m > k && coloring_epsilon > 0.0
        && coloring_epsilon < 1.0 / (2.0 * (m - k) as f64);
    if !eps_in_range {
        flags.push("coloring-epsilon-outside-proof-range".into());
    }

    let (record, stats, conflict_mode, h) = if n < m || shadow.is_empty() {
        flags.push("empty-packing".into());
        (
            PackingRecord { n, k, template_id: String::new(), copies: vec![] },
            None,
            ConflictMode::Exact,
            Hypergraph::empty(n, t * k),
        )
    } else {
        let max_copies = (binomial(n as u64, k as u64)
            / num_bigint::BigUint::from(shadow.len() as u64))
        .to_usize()
        .unwrap_or(usize::MAX);
        let target = params.target_copies.unwrap_or(max_copies).min(max_copies.max(1));
        let conflict_mode = params.conflict_mode.unwrap_or(if target <= 64 {
            ConflictMode::Exact
        } else {
            ConflictMode::StrictOverlap
        });
        let mut rng = seed_substream(seed, &["construct", mode.name(), "packing"]);
        let coloring_seed = keyed_hash(seed, &["construct", mode.name(), "coloring"]);
        let (record, stats) = greedy_conflict_free_packing(
            &shadow,
            n,
            k,
            e,
            coloring_epsilon,
            params.strategy,
            conflict_mode,
            &mut rng,
            coloring_seed,
            target,
            params.budget,
        )?;
        // packing audits (Lemma-style hypotheses (i) and (ii) on 𝓟)
        packing::verify_bijections(&record, &shadow)?;
        if !record.copies.is_empty() {
            let w = properties::is_induced_packing(&record, k)?;
            verdicts.push(VerdictRecord {
                name: "packing-induced".into(),
                holds: w.holds,
                method: "exhaustive".into(),
            });
            if !w.holds {
                return Err(HxError::HypothesisFailed("packing is not induced".into()));
            }
            let (holds, method) = if conflict_mode == ConflictMode::Exact
                || record.copies.len() <= 80
            {
                (
                    packing::audit_vertex_family_ell_free(&record, m, e).is_none(),
                    "exhaustive".to_string(),
                )
            } else {
                // pairwise overlaps ≤ ⌊2k/e⌋ bound the total overlap defect of
                // any ℓ ≤ e copies below the configuration threshold
                let cap = strict_overlap_cap(k, e);
                let mut ok = true;
                'outer: for i in 0..record.copies.len() {
                    for j in i + 1..record.copies.len() {
                        if record.copies[i]
                            .vertices
                            .intersection_count(&record.copies[j].vertices)
                            > cap
                        {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                (ok, "structural-overlap-cap".to_string())
            };
            verdicts.push(VerdictRecord {
                name: "packing-vertex-family-ell-free".into(),
                holds,
                method,
            });
            if !holds {
                return Err(HxError::HypothesisFailed(
                    "packing vertex family is not ℓ⁻-free".into(),
                ));
            }
        }
        let h = assemble_hf(&f, &record)?;
        (record, Some(stats), conflict_mode, h)
    };

    // --- stage 5: verify the assembled family ----------------------------
    let exhaustive = h.len() <= params.exhaustive_edge_budget;
    if !h.is_empty() {
        // Lemma-style composition law: 𝓗 is ℓ⁻-free for every 2 ≤ ℓ ≤ e.
        // At desk scale this is enumerated (connected DFS, valid because the
        // levels are checked ascending); above the budget it follows from the
        // verified hypotheses and is additionally spot-sampled.
        let mut smaller_ok = true;
        for ell in 2..=e {
            let (holds, method) = if exhaustive && smaller_ok {
                (
                    find_connected_ell_violation(h.edges(), k, ell).is_none(),
                    "exhaustive".to_string(),
                )
            } else {
                (
                    sample_ell_tuples_ok(&h, k, ell, seed, 100_000),
                    "sufficient-conditions+sampled".to_string(),
                )
            };
            verdicts.push(VerdictRecord {
                name: format!("H-ell-free-l{ell}"),
                holds,
                method,
            });
            smaller_ok &= holds;
        }
        match mode {
            Mode::Cancellative => {
                let tc = 2 * (t - 1);
                let (holds, method) = if exhaustive {
                    let w = properties::is_t_cancellative(&h, tc)?;
                    (w.holds, "verified-exhaustive".to_string())
                } else {
                    (
                        sample_cancellative_ok(&h, tc, seed, 1_000_000),
                        "verified-sufficient-conditions+sampled".to_string(),
                    )
                };
                verdicts.push(VerdictRecord {
                    name: format!("H-cancellative-t{tc}"),
                    holds,
                    method,
                });
            }
            Mode::UnionFree => {
                let w = properties::is_t_cover_free(&h, t)?;
                verdicts.push(VerdictRecord {
                    name: format!("H-cover-free-t{t}"),
                    holds: w.holds,
                    method: "verified-exhaustive".into(),
                });
                let tu = t + 1;
                let (holds, method) = if h.len() <= 60 {
                    let w = properties::is_t_union_free(&h, tu)?;
                    (w.holds, "verified-exhaustive".to_string())
                } else {
                    (
                        sample_union_free_ok(&h, tu, seed, 1_000_000),
                        "verified-sufficient-conditions+sampled".to_string(),
                    )
                };
                verdicts.push(VerdictRecord {
                    name: format!("H-union-free-t{tu}"),
                    holds,
                    method,
                });
            }
        }
    }

    // --- density ratio: |H| / (C(n,k)/C(tk−1,k−1)) ------------------------
    let numer = BigInt::from(h.len() as u64)
        * BigInt::from(binomial((t * k - 1) as u64, (k - 1) as u64));
    let denom = BigInt::from(binomial(n as u64, k as u64));
    let (density_numer, density_denom, density_value) = if denom == BigInt::from(0) {
        ("0".into(), "1".into(), 0.0)
    } else {
        let ratio = BigRational::new(numer.clone(), denom.clone());
        (
            ratio.numer().to_string(),
            ratio.denom().to_string(),
            ratio.to_f64().unwrap_or(0.0),
        )
    };

    let report = PipelineReport {
        mode: mode.name().into(),
        t,
        k,
        e,
        m0,
        m,
        n,
        seed,
        c_hat,
        sizes: StageSizes {
            g: g.len(),
            f: f.len(),
            shadow: shadow.len(),
            copies: record.copies.len(),
            h: h.len(),
        },
        density_numer,
        density_denom,
        density_value,
        coloring_epsilon,
        coloring_epsilon_in_proof_range: eps_in_range,
        conflict_mode: format!("{conflict_mode:?}"),
        generator_attempts: gen.attempts,
        generator_met_floor: gen.met_floor,
        packing_stats: stats,
        verdicts,
        flags,
    };
    Ok(PipelineArtifacts { g, f, shadow, packing: record, h, report })
}

/// Samples random ℓ-tuples of distinct edges and checks the (v,ℓ) threshold.
fn sample_ell_tuples_ok(h: &Hypergraph, k: usize, ell: usize, seed: u64, samples: u64) -> bool {
    if h.len() < ell {
        return true;
    }
    let v_max = ell * h.r() - (ell - 1) * k - 1;
    let mut rng = seed_substream(seed, &["sample", "ell", &ell.to_string()]);
    for _ in 0..samples {
        let idx = rand::seq::index::sample(&mut rng, h.len(), ell);
        let mut union = h.edge(idx.index(0)).clone();
        for i in 1..ell {
            union.union_with(h.edge(idx.index(i)));
        }
        if union.count() <= v_max {
            return false;
        }
    }
    true
}

/// Samples random (B, C, A₁..A_t) tuples and checks BΔC ⊄ ∪Aᵢ.
fn sample_cancellative_ok(h: &Hypergraph, t: usize, seed: u64, samples: u64) -> bool {
    if h.len() < t + 2 {
        return true;
    }
    let mut rng = seed_substream(seed, &["sample", "cancellative"]);
    for _ in 0..samples {
        let idx = rand::seq::index::sample(&mut rng, h.len(), t + 2);
        let b = h.edge(idx.index(0));
        let c = h.edge(idx.index(1));
        let delta = b.symmetric_difference(c);
        let mut cover = crate::bitset::BitSet::new(h.n());
        for i in 2..t + 2 {
            cover.union_with(h.edge(idx.index(i)));
        }
        if delta.is_subset(&cover) {
            return false;
        }
    }
    true
}

/// Samples random pairs of distinct subfamilies of size ≤ t and compares
/// unions.
fn sample_union_free_ok(h: &Hypergraph, t: usize, seed: u64, samples: u64) -> bool {
    if h.len() < 2 {
        return true;
    }
    let mut rng = seed_substream(seed, &["sample", "union-free"]);
    for _ in 0..samples {
        let sa = rng.gen_range(1..=t.min(h.len()));
        let sb = rng.gen_range(1..=t.min(h.len()));
        let a: Vec<usize> = rand::seq::index::sample(&mut rng, h.len(), sa).into_vec();
        let b: Vec<usize> = rand::seq::index::sample(&mut rng, h.len(), sb).into_vec();
        let mut a = a;
        let mut b = b;
        a.sort_unstable();
        b.sort_unstable();
        if a == b {
            continue;
        }
        let ua = union_of(h, &a);
        let ub = union_of(h, &b);
        if ua == ub {
            return false;
        }
    }
    true
}

fn union_of(h: &Hypergraph, idx: &[usize]) -> crate::bitset::BitSet {
    let mut u = crate::bitset::BitSet::new(h.n());
    for &i in idx {
        u.union_with(h.edge(i));
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::{is_ell_minus_free, is_t_cancellative};

    #[test]
    fn generator_output_is_ell_free() {
        let g = random_ell_minus_free(12, 3, 2, 4, 7).unwrap();
        assert_eq!((g.n(), g.r()), (12, 3));
        for ell in 2..=4 {
            assert!(is_ell_minus_free(&g, 2, ell).unwrap().holds);
        }
        // ℓ=2 case: pairwise defect |A∩B| stays at most k
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                assert!(g.edge(i).intersection_count(g.edge(j)) <= 2);
            }
        }
    }

    #[test]
    fn generator_m_equals_r_keeps_at_most_one_edge() {
        let out = random_ell_minus_free_detailed(3, 3, 2, 2, 1, 5).unwrap();
        assert!(out.graph.len() <= 1);
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let a = random_ell_minus_free_detailed(12, 3, 2, 4, 99, 5).unwrap();
        let b = random_ell_minus_free_detailed(12, 3, 2, 4, 99, 5).unwrap();
        assert_eq!(a.graph, b.graph);
        let c = random_ell_minus_free_detailed(12, 3, 2, 4, 100, 5).unwrap();
        assert!(a.graph != c.graph || a.graph.len() <= 1);
    }

    #[test]
    fn lift_examples() {
        let g = Hypergraph::empty(5, 3);
        let f = lift_to_f(&g).unwrap();
        assert_eq!((f.n(), f.r(), f.len()), (5, 4, 0));

        let g = Hypergraph::canonicalize(&[vec![0, 1, 2]], 3, 3).unwrap();
        let f = lift_to_f(&g).unwrap();
        assert_eq!(f.edge_lists(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn lift_preserves_ell_freeness() {
        let g = random_ell_minus_free(12, 3, 2, 4, 21).unwrap();
        let f = lift_to_f(&g).unwrap();
        for ell in 2..=4 {
            assert!(is_ell_minus_free(&f, 2, ell).unwrap().holds);
        }
    }

    #[test]
    fn shadow_examples() {
        let f = Hypergraph::canonicalize(&[vec![0, 1, 2, 3]], 4, 4).unwrap();
        assert_eq!(k_shadow(&f, 2).unwrap().len(), 6);
        let f2 =
            Hypergraph::canonicalize(&[vec![0, 1, 2, 3], vec![4, 5, 6, 7]], 8, 4).unwrap();
        assert_eq!(k_shadow(&f2, 2).unwrap().len(), 12);
    }

    #[test]
    fn shadow_size_bound_on_lifted_families() {
        let (t, k) = (2, 2);
        let g = random_ell_minus_free(10, t * k - 1, k, 2 * t, 5).unwrap();
        let f = lift_to_f(&g).unwrap();
        let j = k_shadow(&f, k).unwrap();
        let bound = binomial_u64(10, k as u64) as usize
            + f.len() * binomial_u64((t * k - 1) as u64, (k - 1) as u64) as usize;
        assert!(j.len() <= bound);
    }

    #[test]
    fn choose_m0_satisfies_criterion() {
        let b = binomial_u64(3, 1) as f64;
        for &(eps, c_hat) in &[(0.5, 0.1), (0.9, 1.0), (0.25, 0.3)] {
            let m0 = choose_m0(2, 2, eps, c_hat).unwrap();
            let check = |m0: usize| {
                1.0 / (c_hat.recip() * (m0 as f64).powf(-1.0 / 3.0) + b)
                    >= (1.0 - eps / 2.0) / b
            };
            assert!(check(m0), "m0={m0} eps={eps} c_hat={c_hat}");
            if m0 > 1 {
                assert!(!check(m0 - 1), "m0-1 also satisfies, not minimal");
            }
        }
    }

    #[test]
    fn choose_m0_monotone_in_epsilon() {
        let m_lo = choose_m0(2, 2, 0.2, 1.0).unwrap();
        let m_hi = choose_m0(2, 2, 0.9, 1.0).unwrap();
        assert!(m_hi <= m_lo);
    }

    #[test]
    fn assemble_single_identity_copy_is_f() {
        let g = Hypergraph::canonicalize(&[vec![0, 1, 2]], 4, 3).unwrap();
        let f = lift_to_f(&g).unwrap();
        let shadow = k_shadow(&f, 2).unwrap();
        let copy = packing::place_along(&shadow, f.n(), &(0..f.n()).collect::<Vec<_>>());
        let p = PackingRecord { n: f.n(), k: 2, template_id: "t".into(), copies: vec![copy] };
        let h = assemble_hf(&f, &p).unwrap();
        assert_eq!(h.edges(), f.edges());
    }

    #[test]
    fn assemble_two_disjoint_copies_doubles_edges() {
        let g = Hypergraph::canonicalize(&[vec![0, 1, 2]], 3, 3).unwrap();
        let f = lift_to_f(&g).unwrap(); // single 4-edge on 4 vertices
        let shadow = k_shadow(&f, 2).unwrap();
        let c1 = packing::place_along(&shadow, 10, &[0, 1, 2, 3]);
        let c2 = packing::place_along(&shadow, 10, &[4, 5, 6, 7]);
        let p = PackingRecord { n: 10, k: 2, template_id: "t".into(), copies: vec![c1, c2] };
        let h = assemble_hf(&f, &p).unwrap();
        assert_eq!(h.len(), 2 * f.len());
    }

    #[test]
    fn assemble_rejects_forged_copy() {
        let g = Hypergraph::canonicalize(&[vec![0, 1, 2]], 4, 3).unwrap();
        let f = lift_to_f(&g).unwrap();
        let shadow = k_shadow(&f, 2).unwrap();
        let mut copy = packing::place_along(&shadow, f.n(), &(0..f.n()).collect::<Vec<_>>());
        copy.edges.pop();
        let p = PackingRecord { n: f.n(), k: 2, template_id: "t".into(), copies: vec![copy] };
        assert!(matches!(assemble_hf(&f, &p), Err(HxError::ShadowMismatch { .. })));
    }

    #[test]
    fn cancellative_pipeline_desk_scale() {
        let mut params = ConstructionParams::new(2, 2, 30, 11);
        params.m0 = Some(8);
        params.budget = 5_000;
        let (h, report) = build_cancellative(&params).unwrap();
        assert_eq!(report.sizes.h, report.sizes.copies * report.sizes.f);
        assert!(report.all_verdicts_hold(), "verdicts: {:?}", report.verdicts);
        if !h.is_empty() {
            assert!(is_t_cancellative(&h, 2).unwrap().holds);
            for ell in 2..=4 {
                assert!(is_ell_minus_free(&h, 2, ell).unwrap().holds);
            }
        }
    }

    #[test]
    fn union_free_pipeline_desk_scale() {
        let mut params = ConstructionParams::new(2, 2, 25, 13);
        params.m0 = Some(6);
        params.budget = 5_000;
        params.target_copies = Some(5);
        let (h, report) = build_union_free(&params).unwrap();
        assert!(report.all_verdicts_hold(), "verdicts: {:?}", report.verdicts);
        if !h.is_empty() {
            assert!(properties::is_t_cover_free(&h, 2).unwrap().holds);
            assert!(properties::is_t_union_free(&h, 3).unwrap().holds);
        }
    }

    #[test]
    fn pipeline_small_n_gives_empty_h() {
        let mut params = ConstructionParams::new(2, 2, 4, 3);
        params.m0 = Some(8);
        let (h, report) = build_cancellative(&params).unwrap();
        assert!(h.is_empty());
        assert_eq!(report.density_value, 0.0);
    }

    #[test]
    fn pipeline_deterministic_per_params() {
        let mut params = ConstructionParams::new(2, 2, 25, 77);
        params.m0 = Some(8);
        params.budget = 2_000;
        let (h1, r1) = build_cancellative(&params).unwrap();
        let (h2, r2) = build_cancellative(&params).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }

    #[test]
    fn cross_copy_edges_share_few_vertices() {
        // any two edges from distinct copies share at most k-1 vertices
        let mut params = ConstructionParams::new(2, 2, 30, 19);
        params.m0 = Some(8);
        params.budget = 5_000;
        let (_, report) = build_cancellative(&params).unwrap();
        assert!(report.all_verdicts_hold());
        let g = random_ell_minus_free(
            8,
            3,
            2,
            4,
            keyed_hash(19, &["construct", "cancellative", "generator"]),
        );
        // the generator inside the pipeline used a different retry wrapper;
        // re-derive the cross-copy law from a fresh desk-scale build instead
        drop(g);
        let mut params2 = ConstructionParams::new(2, 2, 25, 23);
        params2.m0 = Some(8);
        params2.budget = 3_000;
        let (h, rep) = build_cancellative(&params2).unwrap();
        assert!(rep.all_verdicts_hold());
        let f_len = rep.sizes.f;
        if rep.sizes.copies >= 2 {
            let edges = h.edges();
            // copies appear as consecutive blocks only after sorting; check
            // globally instead: any two edges sharing >= k vertices must lie
            // in the same copy, which is implied by ℓ=2 freeness of H
            for i in 0..edges.len() {
                for j in i + 1..edges.len() {
                    let shared = edges[i].intersection_count(&edges[j]);
                    assert!(shared <= 2 * 2 - 2, "f_len={f_len} shared={shared}");
                }
            }
        }
    }
}
