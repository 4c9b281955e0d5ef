//! Thresholded similarity graphs, modularity and Louvain community detection.

mod export;
mod louvain;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

pub use export::{to_dot, to_json_dump, GraphDump};
pub use louvain::{louvain, louvain_run, LouvainRun};

use crate::error::{Error, Result};
use crate::segment::SentenceRef;
use crate::similarity::SimilarityScore;

pub const DEFAULT_TAU: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Node index, always `< b`.
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Undirected weighted graph over sentences.
///
/// Nodes are kept sorted by [`SentenceRef`]; node indices used throughout the
/// graph, partition and ranking APIs refer to that order.
#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    nodes: Vec<SentenceRef>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    two_m: f64,
    tau: f64,
}

impl SimilarityGraph {
    /// Builds a graph from explicit nodes and weighted edges.
    ///
    /// `tau` may be 0 here for a plain positively weighted graph; every edge
    /// weight must be finite and strictly above `tau`. Each unordered pair may
    /// appear at most once and self-loops are rejected.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = SentenceRef>,
        edges: impl IntoIterator<Item = (SentenceRef, SentenceRef, f64)>,
        tau: f64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::Config(format!("threshold {tau} outside [0, 1)")));
        }
        let nodes: Vec<SentenceRef> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let index: BTreeMap<SentenceRef, usize> = nodes.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (ra, rb, w) in edges {
            let (Some(&ia), Some(&ib)) = (index.get(&ra), index.get(&rb)) else {
                return Err(Error::contract(format!("edge {ra}-{rb} references an unknown node")));
            };
            if ia == ib {
                return Err(Error::contract(format!("self-loop on {ra}")));
            }
            if !w.is_finite() || w <= tau {
                return Err(Error::contract(format!(
                    "edge {ra}-{rb} has weight {w}, not above threshold {tau}"
                )));
            }
            let (a, b) = (ia.min(ib), ia.max(ib));
            if !seen.insert((a, b)) {
                return Err(Error::contract(format!("duplicate edge {ra}-{rb}")));
            }
            list.push(Edge { a, b, weight: w });
        }
        list.sort_by_key(|e| (e.a, e.b));

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &list {
            adjacency[e.a].push((e.b, e.weight));
            adjacency[e.b].push((e.a, e.weight));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(j, _)| j);
        }
        let degree: Vec<f64> = adjacency.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect();
        let two_m = degree.iter().sum();
        Ok(SimilarityGraph {
            nodes,
            edges: list,
            adjacency,
            degree,
            two_m,
            tau,
        })
    }

    pub fn nodes(&self) -> &[SentenceRef] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn index_of(&self, r: SentenceRef) -> Option<usize> {
        self.nodes.binary_search(&r).ok()
    }

    /// Neighbours of node `i` with edge weights, sorted by neighbour index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Sum of the weights of the edges attached to node `i`.
    pub fn degree(&self, i: usize) -> f64 {
        self.degree[i]
    }

    /// Total edge weight `m`.
    pub fn total_weight(&self) -> f64 {
        self.two_m / 2.0
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.adjacency[i].is_empty()
    }

    pub fn isolated(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.is_isolated(i)).collect()
    }

    pub(crate) fn two_m(&self) -> f64 {
        self.two_m
    }
}

/// Keeps exactly the pairs scoring strictly above `tau`, weighted by their score.
/// Every sentence that appears in `scores` becomes a node, edges or not.
pub fn build_graph(scores: &[SimilarityScore], tau: f64) -> Result<SimilarityGraph> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Config(format!("threshold {tau} outside (0, 1)")));
    }
    let nodes: BTreeSet<SentenceRef> = scores.iter().flat_map(|s| [s.a, s.b]).collect();
    let kept: Vec<(SentenceRef, SentenceRef, f64)> = scores
        .par_iter()
        .filter(|s| s.sigma > tau)
        .map(|s| (s.a, s.b, s.sigma))
        .collect();
    SimilarityGraph::from_edges(nodes, kept, tau)
}

/// Assignment of every graph node to a community, with its modularity.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    community_count: usize,
    modularity: f64,
}

impl Partition {
    /// Relabels `labels` (one per node) densely from 0 in order of first
    /// appearance and computes the modularity.
    pub fn new(graph: &SimilarityGraph, labels: &[usize]) -> Result<Self> {
        let assignment = dense_labels(labels);
        let modularity = modularity(graph, &assignment)?;
        let community_count = assignment.iter().max().map_or(0, |&c| c + 1);
        Ok(Partition {
            assignment,
            community_count,
            modularity,
        })
    }

    pub fn singletons(graph: &SimilarityGraph) -> Result<Self> {
        let labels: Vec<usize> = (0..graph.node_count()).collect();
        Self::new(graph, &labels)
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn modularity(&self) -> f64 {
        self.modularity
    }

    /// Node indices of every community, each list ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

pub(crate) fn dense_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Newman modularity of `assignment` (one community label per node).
///
/// Computed per community as `in_c / 2m - (tot_c / 2m)^2`, where `tot_c` sums
/// member degrees and `in_c = tot_c - cut_c` is the ordered-pair weight inside
/// the community. Isolated nodes contribute nothing.
pub fn modularity(graph: &SimilarityGraph, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != graph.node_count() {
        return Err(Error::contract(format!(
            "assignment covers {} nodes, graph has {}",
            assignment.len(),
            graph.node_count()
        )));
    }
    let two_m = graph.two_m();
    if two_m <= 0.0 {
        return Err(Error::UndefinedModularity);
    }
    let mut tot: BTreeMap<usize, f64> = BTreeMap::new();
    let mut cut: BTreeMap<usize, f64> = BTreeMap::new();
    for (i, &c) in assignment.iter().enumerate() {
        *tot.entry(c).or_default() += graph.degree(i);
    }
    for e in graph.edges() {
        let (ca, cb) = (assignment[e.a], assignment[e.b]);
        if ca != cb {
            *cut.entry(ca).or_default() += e.weight;
            *cut.entry(cb).or_default() += e.weight;
        }
    }
    let q = tot
        .iter()
        .map(|(c, &t)| {
            let internal = t - cut.get(c).copied().unwrap_or(0.0);
            internal / two_m - (t / two_m) * (t / two_m)
        })
        .sum();
    Ok(q)
}
