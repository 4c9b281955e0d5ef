//! End-to-end runs: review summarization, multi-answer extraction and
//! single-question answering, producing serializable reports.

use std::collections::HashMap;

use serde::Serialize;

use crate::embed::{embed_all, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::graph::{build_graph, louvain, Partition, SimilarityGraph};
use crate::qa::{
    cluster_answers, collect_answers, filter_answers, AnswerCluster, AnswerProvider, AskStatus, ClusterParams,
    QuestionGroup,
};
use crate::ranking::{tag_communities, textrank};
use crate::segment::{segment_corpus, Review, Sentence, SentenceRef};
use crate::similarity::pairwise_similarities;

/// Sentences embedded per provider call.
pub const EMBED_BATCH: usize = 32;

#[derive(Debug, Clone)]
pub struct SummarizeConfig {
    pub min_tokens: usize,
    pub cluster: ClusterParams,
}

impl Default for SummarizeConfig {
    fn default() -> Self {
        SummarizeConfig {
            min_tokens: crate::segment::DEFAULT_MIN_TOKENS,
            cluster: ClusterParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceEntry {
    pub review_index: usize,
    pub review_id: String,
    pub sentence_index: usize,
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityReport {
    pub community: usize,
    pub member_count: usize,
    pub tag: SentenceEntry,
    pub members: Vec<SentenceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub seed: u64,
    pub tau: f64,
    pub damping: f64,
    pub min_tokens: usize,
    pub dimension: usize,
    pub review_count: usize,
    pub sentence_count: usize,
    pub edge_count: usize,
    pub modularity: f64,
    pub textrank_converged: bool,
    pub textrank_iterations: usize,
    pub communities: Vec<CommunityReport>,
    pub isolated_count: usize,
    pub isolated: Vec<SentenceEntry>,
}

/// Report plus the intermediate graph and partition, for export.
#[derive(Debug, Clone)]
pub struct Summary {
    pub report: SummaryReport,
    pub sentences: Vec<Sentence>,
    pub graph: SimilarityGraph,
    pub partition: Partition,
}

/// Segment, embed, compare, threshold, cluster, rank and tag.
///
/// Fails with [`Error::UndefinedModularity`] when no pair of sentences scores
/// above the threshold.
pub fn summarize<E: EmbeddingProvider + ?Sized>(
    reviews: &[Review],
    embedder: &E,
    config: &SummarizeConfig,
) -> Result<Summary> {
    let params = &config.cluster;
    let sentences = segment_corpus(reviews, config.min_tokens)?;
    if sentences.len() < 2 {
        return Err(Error::UndefinedModularity);
    }
    let embeddings = embed_all(embedder, &sentences, EMBED_BATCH)?;
    let scores = pairwise_similarities(&embeddings)?;
    let graph = build_graph(&scores, params.tau)?;
    let partition = louvain(&graph, params.seed)?;
    let ranks = textrank(&graph, params.damping, params.tolerance, params.max_iter)?;

    let by_ref: HashMap<SentenceRef, &Sentence> = sentences.iter().map(|s| (s.sentence_ref(), s)).collect();
    let review_id: HashMap<usize, &str> = reviews.iter().map(|r| (r.index, r.id.as_str())).collect();
    let sentence_at = |node: usize| -> &Sentence { by_ref[&graph.nodes()[node]] };
    let entry = |node: usize| -> SentenceEntry {
        let s = sentence_at(node);
        SentenceEntry {
            review_index: s.review_index,
            review_id: review_id[&s.review_index].to_string(),
            sentence_index: s.sentence_index,
            text: s.text.clone(),
            score: ranks.score[node],
        }
    };

    let members = partition.communities();
    let tags = tag_communities(&graph, &partition, &ranks, |r| by_ref[&r].text.clone())?;
    let communities = tags
        .iter()
        .map(|t| CommunityReport {
            community: t.community,
            member_count: t.member_count,
            tag: entry(t.node),
            members: members[t.community].iter().map(|&i| entry(i)).collect(),
        })
        .collect();
    let isolated: Vec<SentenceEntry> = graph.isolated().into_iter().map(entry).collect();

    let report = SummaryReport {
        seed: params.seed,
        tau: params.tau,
        damping: params.damping,
        min_tokens: config.min_tokens,
        dimension: embedder.dimension(),
        review_count: reviews.len(),
        sentence_count: sentences.len(),
        edge_count: graph.edges().len(),
        modularity: partition.modularity(),
        textrank_converged: ranks.converged,
        textrank_iterations: ranks.iterations_used,
        communities,
        isolated_count: isolated.len(),
        isolated,
    };
    Ok(Summary {
        report,
        sentences,
        graph,
        partition,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberReport {
    pub review_id: String,
    pub text: String,
    pub question: String,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub tag: String,
    pub tag_review_id: String,
    pub tag_confidence: f64,
    pub tag_score: f64,
    pub member_count: usize,
    pub member_review_ids: Vec<String>,
    pub members: Vec<MemberReport>,
}

impl From<&AnswerCluster> for ClusterReport {
    fn from(c: &AnswerCluster) -> Self {
        ClusterReport {
            tag: c.tag_text.clone(),
            tag_review_id: c.tag_review_id.clone(),
            tag_confidence: c.tag_confidence,
            tag_score: c.tag_score,
            member_count: c.member_count,
            member_review_ids: c.members.iter().map(|m| m.review_id.clone()).collect(),
            members: c
                .members
                .iter()
                .map(|m| MemberReport {
                    review_id: m.review_id.clone(),
                    text: m.text.clone(),
                    question: m.question_used.clone(),
                    confidence: m.confidence,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub group_id: String,
    pub original: String,
    pub paraphrases: Vec<String>,
    pub answer_count: usize,
    pub modularity: Option<f64>,
    pub clusters: Vec<ClusterReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractReport {
    pub seed: u64,
    pub tau: f64,
    pub review_count: usize,
    pub provider_calls: usize,
    pub provider_failures: usize,
    pub groups: Vec<GroupReport>,
}

/// Collects answers for every group over all reviews, then filters and
/// clusters each group's answers separately.
pub fn extract<P, E>(
    reviews: &[Review],
    groups: &[QuestionGroup],
    provider: &P,
    embedder: &E,
    params: &ClusterParams,
    max_in_flight: usize,
) -> Result<ExtractReport>
where
    P: AnswerProvider + ?Sized,
    E: EmbeddingProvider + ?Sized,
{
    let collected = collect_answers(reviews, groups, provider, max_in_flight)?;
    let filtered = filter_answers(&collected.answers);
    let mut out = Vec::with_capacity(groups.len());
    for g in groups {
        let answers: Vec<_> = filtered.iter().filter(|a| a.group_id == g.id).cloned().collect();
        let set = cluster_answers(&g.id, &answers, embedder, params)?;
        out.push(GroupReport {
            group_id: g.id.clone(),
            original: g.original.clone(),
            paraphrases: g.paraphrases.clone(),
            answer_count: answers.len(),
            modularity: set.modularity,
            clusters: set.clusters.iter().map(ClusterReport::from).collect(),
        });
    }
    Ok(ExtractReport {
        seed: params.seed,
        tau: params.tau,
        review_count: reviews.len(),
        provider_calls: collected.calls,
        provider_failures: collected.failures.len(),
        groups: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AskReport {
    pub status: AskStatus,
    pub clusters: Vec<ClusterReport>,
}

#[allow(clippy::too_many_arguments)]
pub fn ask_report<P, E>(
    question: &str,
    reviews: &[Review],
    provider: &P,
    embedder: &E,
    params: &ClusterParams,
    top_k: usize,
    max_in_flight: usize,
) -> Result<AskReport>
where
    P: AnswerProvider + ?Sized,
    E: EmbeddingProvider + ?Sized,
{
    let r = crate::qa::ask(question, reviews, provider, embedder, params, top_k, max_in_flight)?;
    Ok(AskReport {
        status: r.status,
        clusters: r.clusters.iter().map(ClusterReport::from).collect(),
    })
}
