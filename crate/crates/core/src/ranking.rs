//! Weighted TextRank centrality and community tagging.
//!
//! Scores follow
//! `C_j = (1 - d) + d * Σ_{k ∈ adj(j)} w_jk / (Σ_{l ∈ adj(k)} w_kl) * C_k`,
//! iterated from `C = 1` over the whole graph (not per community) until the
//! largest change drops below the tolerance.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Partition, SimilarityGraph};
use crate::segment::SentenceRef;

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Below this many nodes an iteration runs on the calling thread.
const PARALLEL_MIN_NODES: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationScores {
    /// Indexed by graph node.
    pub score: Vec<f64>,
    pub damping: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

pub fn textrank(graph: &SimilarityGraph, damping: f64, tol: f64, max_iter: usize) -> Result<CorrelationScores> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::contract("textrank on an empty graph"));
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::Config(format!("damping {damping} outside (0, 1)")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Config(format!("tolerance {tol} must be positive")));
    }
    let step = |prev: &[f64], j: usize| -> f64 {
        let inflow: f64 = graph
            .neighbors(j)
            .iter()
            .map(|&(k, w)| w / graph.degree(k) * prev[k])
            .sum();
        (1.0 - damping) + damping * inflow
    };

    let mut current = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut iterations_used = 0;
    let mut converged = false;
    while iterations_used < max_iter {
        if n >= PARALLEL_MIN_NODES {
            next.par_iter_mut().enumerate().for_each(|(j, out)| *out = step(&current, j));
        } else {
            for (j, out) in next.iter_mut().enumerate() {
                *out = step(&current, j);
            }
        }
        iterations_used += 1;
        let change = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut current, &mut next);
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(CorrelationScores {
        score: current,
        damping,
        iterations_used,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityTag {
    pub community: usize,
    /// Graph node index of the tag sentence.
    pub node: usize,
    pub tag_sentence: SentenceRef,
    pub tag_text: String,
    pub score: f64,
    pub member_count: usize,
}

/// Tags each community with its highest-scoring member.
///
/// Ties go to the smallest sentence ref. Singleton communities made of an
/// isolated node are skipped. Output is sorted by member count, largest
/// first, then by community id.
pub fn tag_communities<F>(
    graph: &SimilarityGraph,
    partition: &Partition,
    scores: &CorrelationScores,
    text_of: F,
) -> Result<Vec<CommunityTag>>
where
    F: Fn(SentenceRef) -> String,
{
    if partition.assignment().len() != graph.node_count() || scores.score.len() != graph.node_count() {
        return Err(Error::contract("partition, scores and graph cover different node sets"));
    }
    let mut tags = Vec::new();
    for (community, members) in partition.communities().into_iter().enumerate() {
        if members.is_empty() || (members.len() == 1 && graph.is_isolated(members[0])) {
            continue;
        }
        // members are ascending node indices, i.e. ascending sentence refs, so
        // a strict comparison keeps the smallest ref on ties
        let mut best = members[0];
        for &m in &members[1..] {
            if scores.score[m] > scores.score[best] {
                best = m;
            }
        }
        let tag_sentence = graph.nodes()[best];
        tags.push(CommunityTag {
            community,
            node: best,
            tag_sentence,
            tag_text: text_of(tag_sentence),
            score: scores.score[best],
            member_count: members.len(),
        });
    }
    tags.sort_by(|a, b| b.member_count.cmp(&a.member_count).then(a.community.cmp(&b.community)));
    Ok(tags)
}
