use std::fmt::Write;

use serde::Serialize;

use crate::graph::{Partition, SimilarityGraph};

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#aec7e8", "#ffbb78",
];

/// Graphviz rendering. Node labels are sentence refs (`review:sentence`), edge
/// labels are weights to 3 decimals. With a partition, nodes are filled by
/// community and isolated nodes are left out, as in the usual community plot.
pub fn to_dot(graph: &SimilarityGraph, partition: Option<&Partition>) -> String {
    let mut out = String::from("graph similarity {\n  node [shape=circle, style=filled, fillcolor=\"#ffffff\"];\n");
    for (i, node) in graph.nodes().iter().enumerate() {
        match partition {
            Some(p) => {
                if graph.is_isolated(i) {
                    continue;
                }
                let c = p.community_of(i);
                let _ = writeln!(
                    out,
                    "  \"{node}\" [label=\"{node}\", community={c}, fillcolor=\"{}\"];",
                    PALETTE[c % PALETTE.len()]
                );
            }
            None => {
                let _ = writeln!(out, "  \"{node}\" [label=\"{node}\"];");
            }
        }
    }
    for e in graph.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [label=\"{:.3}\", weight={:.3}];",
            graph.nodes()[e.a],
            graph.nodes()[e.b],
            e.weight,
            e.weight
        );
    }
    out.push_str("}\n");
    out
}

/// `{"nodes": [...], "edges": [[a, b, w], ...], "tau": τ}` with nodes named
/// by sentence ref.
#[derive(Debug, Clone, Serialize)]
pub struct GraphDump {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String, f64)>,
    pub tau: f64,
}

pub fn to_json_dump(graph: &SimilarityGraph) -> GraphDump {
    let name = |i: usize| graph.nodes()[i].to_string();
    GraphDump {
        nodes: (0..graph.node_count()).map(name).collect(),
        edges: graph.edges().iter().map(|e| (name(e.a), name(e.b), e.weight)).collect(),
        tau: graph.tau(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::segment::SentenceRef;
    use crate::similarity::SimilarityScore;

    fn g() -> SimilarityGraph {
        let s = |a: usize, b: usize, sigma: f64| SimilarityScore {
            a: SentenceRef::new(a, 0),
            b: SentenceRef::new(b, 1),
            sigma,
        };
        build_graph(&[s(0, 1, 0.91234), s(0, 2, 0.1), s(1, 2, 0.3)], 0.8).unwrap()
    }

    #[test]
    fn dot_has_weighted_edges() {
        let dot = to_dot(&g(), None);
        assert!(dot.starts_with("graph similarity {"));
        assert!(dot.contains("\"0:0\" -- \"1:1\" [label=\"0.912\""), "{dot}");
        assert!(dot.contains("\"2:1\" [label=\"2:1\"]"));
    }

    #[test]
    fn dot_with_partition_skips_isolated() {
        let graph = g();
        let p = crate::graph::louvain(&graph, 0).unwrap();
        let dot = to_dot(&graph, Some(&p));
        assert!(dot.contains("community=0"));
        assert!(!dot.contains("\"2:1\" [label"));
    }

    #[test]
    fn json_dump_shape() {
        let dump = to_json_dump(&g());
        let v = serde_json::to_value(&dump).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 4);
        assert_eq!(v["edges"][0][0], "0:0");
        assert_eq!(v["edges"][0][1], "1:1");
        assert_eq!(v["tau"], 0.8);
    }
}
