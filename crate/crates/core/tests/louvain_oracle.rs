use proptest::prelude::*;
use rand::Rng;

use revsum_core::graph::{louvain, louvain_run, modularity, Partition, SimilarityGraph};
use revsum_core::SentenceRef;
use revsum_testkit::oracle::{self, WeightedEdge};

fn graph(n: usize, edges: &[WeightedEdge]) -> SimilarityGraph {
    SimilarityGraph::from_edges(
        (0..n).map(|i| SentenceRef::new(i, 0)),
        edges.iter().map(|&(a, b, w)| (SentenceRef::new(a, 0), SentenceRef::new(b, 0), w)),
        0.0,
    )
    .unwrap()
}

fn scaled(edges: &[WeightedEdge], lambda: f64) -> Vec<WeightedEdge> {
    edges.iter().map(|&(a, b, w)| (a, b, w * lambda)).collect()
}

fn two_cliques() -> Vec<WeightedEdge> {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for a in base..base + 4 {
            for b in a + 1..base + 4 {
                edges.push((a, b, 1.0));
            }
        }
    }
    edges.push((3, 4, 0.1));
    edges
}

#[test]
fn two_cliques_match_exhaustive_optimum() {
    let edges = two_cliques();
    let (best_q, argmax) = oracle::best_partitions(8, &edges);
    assert_eq!(argmax, vec![vec![0, 0, 0, 0, 1, 1, 1, 1]]);
    let p = louvain(&graph(8, &edges), 42).unwrap();
    assert_eq!(p.assignment(), argmax[0].as_slice());
    assert!((p.modularity() - best_q).abs() < 1e-9);
}

#[test]
fn k4_single_community_is_optimal() {
    let edges: Vec<WeightedEdge> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b, 0.9))).collect();
    let (best_q, argmax) = oracle::best_partitions(4, &edges);
    assert!(best_q.abs() < 1e-12);
    assert!(argmax.contains(&vec![0, 0, 0, 0]));
    let p = louvain(&graph(4, &edges), 3).unwrap();
    assert_eq!(p.community_count(), 1);
    assert_eq!(p.modularity(), 0.0);
}

#[test]
fn modularity_matches_literal_double_sum() {
    let mut rng = oracle::rng(11);
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let edges = oracle::random_graph(&mut rng, n, 0.5, 0.05, 1.0);
        let g = graph(n, &edges);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let q = modularity(&g, &labels).unwrap();
        assert!((q - oracle::modularity(n, &edges, &labels)).abs() < 1e-9);
        assert!((-1.0..=1.0).contains(&q));
    }
}

#[test]
fn louvain_on_random_graphs_never_beats_oracle() {
    let mut rng = oracle::rng(2024);
    let mut optimal = 0;
    for trial in 0..100 {
        let n = rng.random_range(2..=8);
        let edges = oracle::random_graph(&mut rng, n, 0.45, 0.05, 1.0);
        let g = graph(n, &edges);
        let run = louvain_run(&g, trial).unwrap();
        let q = run.partition.modularity();
        let (best, _) = oracle::best_partitions(n, &edges);
        let singleton = Partition::singletons(&g).unwrap().modularity();
        assert!(q <= best + 1e-9, "trial {trial}: {q} > {best}");
        assert!(q >= singleton - 1e-12, "trial {trial}");
        assert!((run.tracked_modularity - q).abs() < 1e-9, "trial {trial}");
        assert!((oracle::modularity(n, &edges, run.partition.assignment()) - q).abs() < 1e-9);
        if (best - q).abs() < 1e-9 {
            optimal += 1;
        }
    }
    assert!(optimal >= 90, "only {optimal}/100 optimal");
}

#[test]
fn bigger_graph_tracked_modularity_consistent() {
    let mut rng = oracle::rng(5);
    for seed in 0..10 {
        let edges = oracle::random_graph(&mut rng, 60, 0.08, 0.1, 1.0);
        let run = louvain_run(&graph(60, &edges), seed).unwrap();
        assert!((run.tracked_modularity - run.partition.modularity()).abs() < 1e-9);
        assert!(run.levels >= 1);
    }
}

proptest! {
    #[test]
    fn weight_scaling_invariance(
        seed in 0u64..1000,
        graph_seed in any::<u64>(),
        n in 2usize..12,
        lambda in prop::sample::select(vec![0.25, 0.5, 2.0, 3.0, 7.5, 1024.0]),
    ) {
        let mut rng = oracle::rng(graph_seed);
        let edges = oracle::random_graph(&mut rng, n, 0.5, 0.05, 1.0);
        let base = louvain(&graph(n, &edges), seed).unwrap();
        let big = graph(n, &scaled(&edges, lambda));
        let other = louvain(&big, seed).unwrap();
        prop_assert_eq!(base.assignment(), other.assignment());
        prop_assert!((base.modularity() - other.modularity()).abs() < 1e-9);
        let q_scaled = modularity(&big, base.assignment()).unwrap();
        prop_assert!((q_scaled - base.modularity()).abs() < 1e-9);
    }

    #[test]
    fn deterministic_and_no_worse_than_singletons(seed in any::<u64>(), graph_seed in any::<u64>(), n in 2usize..20) {
        let mut rng = oracle::rng(graph_seed);
        let edges = oracle::random_graph(&mut rng, n, 0.3, 0.05, 1.0);
        let g = graph(n, &edges);
        let a = louvain(&g, seed).unwrap();
        let b = louvain(&g, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.modularity() >= Partition::singletons(&g).unwrap().modularity() - 1e-12);
        let ids: std::collections::BTreeSet<usize> = a.assignment().iter().copied().collect();
        prop_assert_eq!(ids.len(), a.community_count());
        prop_assert_eq!(*ids.iter().max().unwrap(), a.community_count() - 1);
    }
}
