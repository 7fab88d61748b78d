//! Randomized cross-checks: independent naive enumerators vs the library
//! checkers, witness replay through the defining inequalities, format
//! round-trips, and monotonicity under edge deletion.

use hx_core::bitset::BitSet;
use hx_core::hypergraph::{k_subsets_of, union_size};
use hx_core::io::{format_hypergraph, parse_hypergraph, HgFormat, IoOptions};
use hx_core::properties::{
    is_t_cancellative, is_t_cover_free, is_t_union_free, is_ve_free, WitnessData,
};
use hx_core::rng::seed_substream;
use hx_core::Hypergraph;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_hypergraph(n: usize, r: usize, max_edges: usize, rng: &mut impl Rng) -> Hypergraph {
    let full = BitSet::from_slice(n, &(0..n).collect::<Vec<_>>());
    let mut all = k_subsets_of(&full, r);
    all.shuffle(rng);
    let m = rng.gen_range(1..=max_edges.min(all.len()));
    all.truncate(m);
    Hypergraph::from_edge_sets(all, n, r).unwrap()
}

fn union_of(h: &Hypergraph, idx: &[usize]) -> BitSet {
    let mut u = BitSet::new(h.n());
    for &i in idx {
        u.union_with(h.edge(i));
    }
    u
}

fn naive_cancellative(h: &Hypergraph, t: usize) -> bool {
    let m = h.len();
    for a in (0..m).combinations(t) {
        let ua = union_of(h, &a);
        for b in 0..m {
            if a.contains(&b) {
                continue;
            }
            for c in b + 1..m {
                if a.contains(&c) {
                    continue;
                }
                if ua.union(h.edge(b)) == ua.union(h.edge(c)) {
                    return false;
                }
            }
        }
    }
    true
}

fn naive_union_free(h: &Hypergraph, t: usize) -> bool {
    let m = h.len();
    for a_mask in 1u32..(1 << m) {
        if (a_mask.count_ones() as usize) > t {
            continue;
        }
        for b_mask in (a_mask + 1)..(1 << m) {
            if (b_mask.count_ones() as usize) > t {
                continue;
            }
            let collect = |mask: u32| (0..m).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
            if union_of(h, &collect(a_mask)) == union_of(h, &collect(b_mask)) {
                return false;
            }
        }
    }
    true
}

fn naive_cover_free(h: &Hypergraph, t: usize) -> bool {
    let m = h.len();
    for b in 0..m {
        for a in (0..m).filter(|&i| i != b).combinations(t) {
            if h.edge(b).is_subset(&union_of(h, &a)) {
                return false;
            }
        }
    }
    true
}

fn naive_ve_free(h: &Hypergraph, v: usize, e: usize) -> bool {
    for tuple in (0..h.len()).combinations(e) {
        if union_of(h, &tuple).count() <= v {
            return false;
        }
    }
    true
}

#[test]
fn checkers_agree_with_naive_enumerators() {
    let mut rng = seed_substream(7, &["replay", "naive"]);
    for i in 0..200 {
        let r = 2 + (i % 2);
        let n = 5 + (i % 3);
        let h = random_hypergraph(n, r, 8, &mut rng);
        for t in 1..=2usize {
            assert_eq!(
                is_t_cancellative(&h, t).unwrap().holds,
                naive_cancellative(&h, t),
                "cancellative t={t} on {:?}",
                h.edge_lists()
            );
            assert_eq!(
                is_t_union_free(&h, t).unwrap().holds,
                naive_union_free(&h, t),
                "union-free t={t} on {:?}",
                h.edge_lists()
            );
            assert_eq!(
                is_t_cover_free(&h, t).unwrap().holds,
                naive_cover_free(&h, t),
                "cover-free t={t} on {:?}",
                h.edge_lists()
            );
        }
        for e in 2..=3usize.min(h.len()) {
            let v = e * r - e; // something in the interesting range
            assert_eq!(
                is_ve_free(&h, v, e).unwrap().holds,
                naive_ve_free(&h, v, e),
                "({v},{e})-free on {:?}",
                h.edge_lists()
            );
        }
    }
}

#[test]
fn witnesses_replay_through_the_definitions() {
    let mut rng = seed_substream(8, &["replay", "witness"]);
    let (mut seen_canc, mut seen_uf, mut seen_cf, mut seen_ve) = (0, 0, 0, 0);
    for i in 0..300 {
        let r = 2 + (i % 2);
        let n = 5 + (i % 3);
        let h = random_hypergraph(n, r, 10, &mut rng);
        let t = 1 + (i % 2);

        let w = is_t_cancellative(&h, t).unwrap();
        if !w.holds {
            seen_canc += 1;
            let Some(WitnessData::Edges(idx)) = w.witness else { panic!("wrong witness kind") };
            assert_eq!(idx.len(), t + 2);
            assert_eq!(idx.iter().unique().count(), t + 2);
            let (a, bc) = idx.split_at(t);
            let ua = union_of(&h, a);
            assert_eq!(ua.union(h.edge(bc[0])), ua.union(h.edge(bc[1])));
        }

        let w = is_t_union_free(&h, t).unwrap();
        if !w.holds {
            seen_uf += 1;
            let Some(WitnessData::Subfamilies { a, b }) = w.witness else {
                panic!("wrong witness kind")
            };
            assert!(!a.is_empty() && !b.is_empty() && a.len() <= t && b.len() <= t);
            assert_ne!(a.iter().sorted().collect_vec(), b.iter().sorted().collect_vec());
            assert_eq!(union_of(&h, &a), union_of(&h, &b));
        }

        let w = is_t_cover_free(&h, t).unwrap();
        if !w.holds {
            seen_cf += 1;
            let Some(WitnessData::Edges(idx)) = w.witness else { panic!("wrong witness kind") };
            assert_eq!(idx.len(), t + 1);
            assert_eq!(idx.iter().unique().count(), t + 1);
            let (a, b) = idx.split_at(t);
            assert!(h.edge(b[0]).is_subset(&union_of(&h, a)));
        }

        if h.len() >= 2 {
            let (v, e) = (2 * r - 1, 2);
            let w = is_ve_free(&h, v, e).unwrap();
            if !w.holds {
                seen_ve += 1;
                let Some(WitnessData::Edges(idx)) = w.witness else {
                    panic!("wrong witness kind")
                };
                assert_eq!(idx.len(), e);
                let sets: Vec<BitSet> = idx.iter().map(|&i| h.edge(i).clone()).collect();
                assert!(union_size(&sets).unwrap() <= v);
            }
        }
    }
    // the generator must actually exercise the failure paths
    assert!(seen_canc > 10 && seen_uf > 10 && seen_cf > 10 && seen_ve > 10);
}

#[test]
fn file_round_trips_preserve_edges() {
    let mut rng = seed_substream(9, &["replay", "roundtrip"]);
    for i in 0..100 {
        let r = 2 + (i % 3);
        let h = random_hypergraph(8, r, 12, &mut rng);
        for one_based in [false, true] {
            let opts = IoOptions { one_based, comments: vec!["generated for tests".into()] };
            let text = format_hypergraph(&h, HgFormat::Text, &opts);
            let back = parse_hypergraph(&text, &opts).unwrap();
            assert_eq!(back, h);
        }
    }
}

#[test]
fn canonicalize_is_idempotent() {
    let mut rng = seed_substream(10, &["replay", "canon"]);
    for _ in 0..100 {
        let h = random_hypergraph(7, 3, 10, &mut rng);
        let again = Hypergraph::canonicalize(&h.edge_lists(), h.n(), h.r()).unwrap();
        assert_eq!(again, h);
    }
}

#[test]
fn properties_survive_edge_deletion() {
    let mut rng = seed_substream(11, &["replay", "monotone"]);
    for i in 0..100 {
        let r = 2 + (i % 2);
        let h = random_hypergraph(6, r, 8, &mut rng);
        if h.len() < 2 {
            continue;
        }
        let t = 1 + (i % 2);
        let keep = rng.gen_range(0..h.len());
        let sub_edges: Vec<BitSet> = h
            .edges()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != keep)
            .map(|(_, e)| e.clone())
            .collect();
        let sub = Hypergraph::from_edge_sets(sub_edges, h.n(), h.r()).unwrap();
        for (full, part) in [
            (is_t_cancellative(&h, t).unwrap().holds, is_t_cancellative(&sub, t).unwrap().holds),
            (is_t_union_free(&h, t).unwrap().holds, is_t_union_free(&sub, t).unwrap().holds),
            (is_t_cover_free(&h, t).unwrap().holds, is_t_cover_free(&sub, t).unwrap().holds),
            (is_ve_free(&h, 2 * r - 1, 2).unwrap().holds, is_ve_free(&sub, 2 * r - 1, 2).unwrap().holds),
        ] {
            assert!(!full || part, "deleting an edge broke a monotone property");
        }
    }
}
