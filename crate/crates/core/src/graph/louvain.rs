//! Two-phase Louvain modularity maximization.
//!
//! Phase one moves single nodes to the neighbouring community with the largest
//! modularity gain until a full pass moves nothing; phase two collapses each
//! community into a super-node. The two phases repeat until phase one finds no
//! move. Nodes are visited in sentence order permuted by a seeded RNG, so the
//! result is reproducible for a given seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{dense_labels, Partition, SimilarityGraph};

/// Minimum modularity gain for a move to count.
const MIN_GAIN: f64 = 1e-12;

/// Safety net; each level strictly increases modularity, so real graphs stop far earlier.
const MAX_LEVELS: usize = 64;

#[derive(Debug, Clone)]
pub struct LouvainRun {
    pub partition: Partition,
    /// Modularity accumulated move by move from the singleton partition.
    pub tracked_modularity: f64,
    /// Number of aggregation levels in which at least one node moved.
    pub levels: usize,
}

/// Graph at one aggregation level.
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Ordered-pair weight inside each super-node (twice its internal edge weight).
    self_weight: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(graph: &SimilarityGraph) -> Self {
        let n = graph.node_count();
        Level {
            adjacency: (0..n).map(|i| graph.neighbors(i).to_vec()).collect(),
            self_weight: vec![0.0; n],
            degree: (0..n).map(|i| graph.degree(i)).collect(),
        }
    }

    fn len(&self) -> usize {
        self.degree.len()
    }

    /// Collapses communities (dense labels) into super-nodes.
    fn aggregate(&self, community: &[usize], count: usize) -> Level {
        let mut self_weight = vec![0.0; count];
        let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        for i in 0..self.len() {
            let ci = community[i];
            self_weight[ci] += self.self_weight[i];
            for &(j, w) in &self.adjacency[i] {
                let cj = community[j];
                if ci == cj {
                    self_weight[ci] += w;
                } else {
                    *links[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adjacency: Vec<Vec<(usize, f64)>> = links.into_iter().map(|m| m.into_iter().collect()).collect();
        let degree = (0..count)
            .map(|c| self_weight[c] + adjacency[c].iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        Level {
            adjacency,
            self_weight,
            degree,
        }
    }
}

/// Phase one. Returns the (non-dense) community of every node, whether any
/// node moved, and the summed modularity change.
fn local_moves(level: &Level, order: &[usize], two_m: f64) -> (Vec<usize>, bool, f64) {
    let n = level.len();
    let mut community: Vec<usize> = (0..n).collect();
    let mut tot = level.degree.clone();
    let mut weight_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    let mut delta_q = 0.0;

    loop {
        let mut moved = false;
        for &i in order {
            let ci = community[i];
            let ki = level.degree[i];
            for &(j, w) in &level.adjacency[i] {
                let cj = community[j];
                if weight_to[cj] == 0.0 {
                    touched.push(cj);
                }
                weight_to[cj] += w;
            }
            tot[ci] -= ki;

            // gain of inserting i into c, in modularity units (up to a shared constant)
            let gain = |c: usize, w_in: f64| 2.0 * (w_in - ki * tot[c] / two_m) / two_m;
            let stay = gain(ci, weight_to[ci]);
            let mut best = (ci, stay);
            touched.sort_unstable();
            for &c in &touched {
                if c == ci {
                    continue;
                }
                let g = gain(c, weight_to[c]);
                if g > best.1 + MIN_GAIN {
                    best = (c, g);
                }
            }

            tot[best.0] += ki;
            if best.0 != ci {
                community[i] = best.0;
                delta_q += best.1 - stay;
                moved = true;
            }
            for &c in &touched {
                weight_to[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        moved_any = true;
    }
    (community, moved_any, delta_q)
}

/// Runs Louvain and also reports the incrementally tracked modularity.
pub fn louvain_run(graph: &SimilarityGraph, seed: u64) -> Result<LouvainRun> {
    let two_m = graph.two_m();
    if graph.edges().is_empty() || two_m <= 0.0 {
        return Err(Error::UndefinedModularity);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(graph);
    let mut node_community: Vec<usize> = (0..graph.node_count()).collect();
    let mut tracked: f64 = level.degree.iter().map(|k| -(k / two_m) * (k / two_m)).sum();
    let mut levels = 0;

    while levels < MAX_LEVELS {
        let mut order: Vec<usize> = (0..level.len()).collect();
        order.shuffle(&mut rng);
        let (community, moved, delta) = local_moves(&level, &order, two_m);
        if !moved {
            break;
        }
        tracked += delta;
        levels += 1;
        let dense = dense_labels(&community);
        let count = dense.iter().max().map_or(0, |&c| c + 1);
        for c in &mut node_community {
            *c = dense[*c];
        }
        level = level.aggregate(&dense, count);
        if count == 1 {
            break;
        }
    }

    let partition = Partition::new(graph, &node_community)?;
    Ok(LouvainRun {
        partition,
        tracked_modularity: tracked,
        levels,
    })
}

pub fn louvain(graph: &SimilarityGraph, seed: u64) -> Result<Partition> {
    louvain_run(graph, seed).map(|r| r.partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::modularity;
    use crate::segment::SentenceRef;

    fn r(i: usize) -> SentenceRef {
        SentenceRef::new(i, 0)
    }

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> SimilarityGraph {
        SimilarityGraph::from_edges((0..n).map(r), edges.iter().map(|&(a, b, w)| (r(a), r(b), w)), 0.0).unwrap()
    }

    fn two_cliques() -> SimilarityGraph {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for a in base..base + 4 {
                for b in a + 1..base + 4 {
                    edges.push((a, b, 1.0));
                }
            }
        }
        edges.push((3, 4, 0.1));
        graph(8, &edges)
    }

    #[test]
    fn splits_two_cliques() {
        for seed in 0..20 {
            let run = louvain_run(&two_cliques(), seed).unwrap();
            assert_eq!(run.partition.assignment(), &[0, 0, 0, 0, 1, 1, 1, 1], "seed {seed}");
            assert!((run.tracked_modularity - run.partition.modularity()).abs() < 1e-9);
        }
    }

    #[test]
    fn single_edge_is_one_community() {
        let p = louvain(&graph(2, &[(0, 1, 0.9)]), 42).unwrap();
        assert_eq!(p.assignment(), &[0, 0]);
        assert_eq!(p.modularity(), 0.0);
    }

    #[test]
    fn complete_graph_is_one_community() {
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                edges.push((a, b, 0.9));
            }
        }
        let p = louvain(&graph(4, &edges), 7).unwrap();
        assert_eq!(p.community_count(), 1);
        assert_eq!(p.modularity(), 0.0);
    }

    #[test]
    fn isolated_nodes_stay_singletons() {
        let g = graph(5, &[(0, 1, 0.9), (1, 2, 0.9), (0, 2, 0.9)]);
        let p = louvain(&g, 1).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 1, 2]);
        assert_eq!(p.modularity(), modularity(&g, p.assignment()).unwrap());
    }

    #[test]
    fn edgeless_is_an_error() {
        let g = graph(3, &[]);
        assert!(matches!(louvain(&g, 0), Err(Error::UndefinedModularity)));
    }

    #[test]
    fn deterministic_per_seed() {
        let g = two_cliques();
        assert_eq!(louvain(&g, 5).unwrap(), louvain(&g, 5).unwrap());
    }
}
