//! Multiple distinct answers per question.
//!
//! Each question group (an original question plus hand-written paraphrases) is
//! fanned out over every review through an [`AnswerProvider`]. Empty and
//! redundant answers are filtered, and the survivors are clustered with the
//! same embedding, graph and ranking stages used for review summarization:
//! each community is one distinct answer, tagged by its best-ranked member.

mod provider;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use provider::{AnswerProvider, FixtureProvider, Query, RemoteAnswerProvider, Span, FIXTURE_KEY_SEPARATOR};

use crate::embed::{embed_all, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::graph::{build_graph, louvain};
use crate::ranking::{tag_communities, textrank, DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
use crate::segment::{Review, Sentence, SentenceRef};
use crate::similarity::pairwise_similarities;

pub const DEFAULT_MAX_IN_FLIGHT: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionGroup {
    pub id: String,
    pub original: String,
    pub paraphrases: Vec<String>,
}

impl QuestionGroup {
    /// A group whose only question is `original`.
    pub fn single(id: impl Into<String>, original: impl Into<String>) -> Self {
        let original = original.into();
        QuestionGroup {
            id: id.into(),
            paraphrases: vec![original.clone()],
            original,
        }
    }

    /// Ensures `original` is among the paraphrases (prepending it if absent)
    /// and that no question is blank.
    pub fn normalized(mut self) -> Result<Self> {
        if self.original.trim().is_empty() {
            return Err(Error::Input(format!("question group {:?} has a blank original", self.id)));
        }
        if self.paraphrases.iter().any(|p| p.trim().is_empty()) {
            return Err(Error::Input(format!("question group {:?} has a blank paraphrase", self.id)));
        }
        if !self.paraphrases.contains(&self.original) {
            self.paraphrases.insert(0, self.original.clone());
        }
        Ok(self)
    }
}

/// Reads a question-group file: a JSON array of `{"id", "original", "paraphrases"}`.
pub fn load_question_groups(path: &Path) -> Result<Vec<QuestionGroup>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read questions {}: {e}", path.display())))?;
    let groups: Vec<QuestionGroup> =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("questions {}: {e}", path.display())))?;
    if groups.is_empty() {
        return Err(Error::Input(format!("questions {} lists no groups", path.display())));
    }
    let mut ids = std::collections::BTreeSet::new();
    for g in &groups {
        if !ids.insert(g.id.clone()) {
            return Err(Error::Input(format!("duplicate question group id {:?}", g.id)));
        }
    }
    groups.into_iter().map(QuestionGroup::normalized).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Answer {
    pub group_id: String,
    pub review_id: String,
    pub review_index: usize,
    pub question_used: String,
    pub text: String,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CallFailure {
    pub review_id: String,
    pub group_id: String,
    pub question: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Collected {
    pub answers: Vec<Answer>,
    pub failures: Vec<CallFailure>,
    pub calls: usize,
}

/// Queries the provider for every (review, group, paraphrase) triple.
///
/// Up to `max_in_flight` calls run at once; results come back in
/// review, group, paraphrase order regardless. Failed calls are recorded and
/// skipped, unless more than half of all calls fail.
pub fn collect_answers<P: AnswerProvider + ?Sized>(
    reviews: &[Review],
    groups: &[QuestionGroup],
    provider: &P,
    max_in_flight: usize,
) -> Result<Collected> {
    if reviews.is_empty() || groups.is_empty() {
        return Err(Error::contract("collect_answers needs at least one review and one question group"));
    }
    let tasks: Vec<(&Review, &QuestionGroup, &str)> = reviews
        .iter()
        .flat_map(|r| groups.iter().flat_map(move |g| g.paraphrases.iter().map(move |p| (r, g, p.as_str()))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_in_flight.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<Option<Span>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(review, _, question)| {
                provider.answer(&Query {
                    question,
                    review_id: &review.id,
                    context: &review.text,
                })
            })
            .collect()
    });

    let calls = tasks.len();
    let mut answers = Vec::new();
    let mut failures = Vec::new();
    for ((review, group, question), result) in tasks.into_iter().zip(results) {
        match result {
            Ok(Some(span)) => answers.push(Answer {
                group_id: group.id.clone(),
                review_id: review.id.clone(),
                review_index: review.index,
                question_used: question.to_string(),
                text: span.text,
                confidence: span.confidence,
            }),
            Ok(None) => {}
            Err(e) => failures.push(CallFailure {
                review_id: review.id.clone(),
                group_id: group.id.clone(),
                question: question.to_string(),
                error: e.to_string(),
            }),
        }
    }
    if failures.len() * 2 > calls {
        return Err(Error::ProviderFailure {
            failed: failures.len(),
            total: calls,
        });
    }
    Ok(Collected {
        answers,
        failures,
        calls,
    })
}

/// Drops blank answers and those without any alphanumeric character, then
/// collapses case-insensitive duplicates within one (group, review), keeping
/// the most confident. Identical answers from different reviews all survive.
/// Output is sorted by review, group and text.
pub fn filter_answers(answers: &[Answer]) -> Vec<Answer> {
    let mut kept: BTreeMap<(usize, String, String), Answer> = BTreeMap::new();
    for a in answers {
        let trimmed = a.text.trim();
        if !trimmed.chars().any(char::is_alphanumeric) {
            continue;
        }
        let key = (a.review_index, a.group_id.clone(), trimmed.to_lowercase());
        match kept.get(&key) {
            Some(prev) if prev.confidence >= a.confidence => {}
            _ => {
                kept.insert(key, a.clone());
            }
        }
    }
    let mut out: Vec<Answer> = kept.into_values().collect();
    out.sort_by(|x, y| {
        (x.review_index, &x.group_id, &x.text)
            .cmp(&(y.review_index, &y.group_id, &y.text))
            .then(x.review_id.cmp(&y.review_id))
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    pub tau: f64,
    pub seed: u64,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            tau: crate::graph::DEFAULT_TAU,
            seed: 42,
            damping: DEFAULT_DAMPING,
            tolerance: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnswerCluster {
    pub tag_text: String,
    pub tag_review_id: String,
    pub tag_confidence: f64,
    /// TextRank score of the tag answer.
    pub tag_score: f64,
    pub member_count: usize,
    pub members: Vec<Answer>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistinctAnswerSet {
    pub group_id: String,
    pub clusters: Vec<AnswerCluster>,
    /// Modularity of the answer partition; absent when no graph edge exists.
    pub modularity: Option<f64>,
}

fn make_cluster(answers: &[Answer], members: &[usize], tag: usize, tag_score: f64) -> AnswerCluster {
    let t = &answers[tag];
    AnswerCluster {
        tag_text: t.text.clone(),
        tag_review_id: t.review_id.clone(),
        tag_confidence: t.confidence,
        tag_score,
        member_count: members.len(),
        members: members.iter().map(|&i| answers[i].clone()).collect(),
    }
}

/// Clusters the filtered answers of one group into distinct answers.
///
/// Answer `i` becomes sentence `(i, 0)`. Answers without any edge above `tau`
/// form single-member clusters. Clusters are ordered by member count, then
/// tag confidence, then tag text.
pub fn cluster_answers<E: EmbeddingProvider + ?Sized>(
    group_id: &str,
    answers: &[Answer],
    embedder: &E,
    params: &ClusterParams,
) -> Result<DistinctAnswerSet> {
    let sentences: Vec<Sentence> = answers
        .iter()
        .enumerate()
        .map(|(i, a)| Sentence::new(i, 0, a.text.clone()))
        .collect();
    if let Some(s) = sentences.iter().find(|s| s.tokens.is_empty()) {
        return Err(Error::contract(format!(
            "answer {:?} has no word tokens; filter answers before clustering",
            s.text
        )));
    }
    let base_score = 1.0 - params.damping;
    let mut clusters = Vec::new();
    let mut q = None;
    if answers.len() == 1 {
        clusters.push(make_cluster(answers, &[0], 0, base_score));
    } else if answers.len() > 1 {
        let embeddings = embed_all(embedder, &sentences, 64)?;
        let scores = pairwise_similarities(&embeddings)?;
        let graph = build_graph(&scores, params.tau)?;
        let ranks = textrank(&graph, params.damping, params.tolerance, params.max_iter)?;
        // node index == answer index, since refs are (i, 0)
        debug_assert!(graph.nodes().iter().enumerate().all(|(i, r)| *r == SentenceRef::new(i, 0)));
        if !graph.edges().is_empty() {
            let partition = louvain(&graph, params.seed)?;
            q = Some(partition.modularity());
            let communities = partition.communities();
            let tags = tag_communities(&graph, &partition, &ranks, |r| answers[r.review].text.clone())?;
            for tag in tags {
                clusters.push(make_cluster(answers, &communities[tag.community], tag.node, tag.score));
            }
        }
        for i in graph.isolated() {
            clusters.push(make_cluster(answers, &[i], i, ranks.score[i]));
        }
    }
    clusters.sort_by(|a, b| {
        b.member_count
            .cmp(&a.member_count)
            .then(b.tag_confidence.total_cmp(&a.tag_confidence))
            .then(a.tag_text.cmp(&b.tag_text))
            .then(a.members[0].review_index.cmp(&b.members[0].review_index))
    });
    Ok(DistinctAnswerSet {
        group_id: group_id.to_string(),
        clusters,
        modularity: q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AskStatus {
    Ok,
    NoAnswers,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AskResult {
    pub status: AskStatus,
    pub clusters: Vec<AnswerCluster>,
}

/// Answers a free-form question: collect, filter and cluster, then keep the
/// `top_k` largest clusters.
pub fn ask<P, E>(
    question: &str,
    reviews: &[Review],
    provider: &P,
    embedder: &E,
    params: &ClusterParams,
    top_k: usize,
    max_in_flight: usize,
) -> Result<AskResult>
where
    P: AnswerProvider + ?Sized,
    E: EmbeddingProvider + ?Sized,
{
    if question.trim().is_empty() {
        return Err(Error::Config("question is empty".into()));
    }
    if top_k == 0 {
        return Err(Error::Config("top_k must be at least 1".into()));
    }
    let group = QuestionGroup::single("ask", question);
    let collected = collect_answers(reviews, std::slice::from_ref(&group), provider, max_in_flight)?;
    let filtered = filter_answers(&collected.answers);
    if filtered.is_empty() {
        return Ok(AskResult {
            status: AskStatus::NoAnswers,
            clusters: Vec::new(),
        });
    }
    let mut set = cluster_answers(&group.id, &filtered, embedder, params)?;
    set.clusters.truncate(top_k);
    Ok(AskResult {
        status: AskStatus::Ok,
        clusters: set.clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::HashEmbedder;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn answer(review: usize, group: &str, text: &str, confidence: f64) -> Answer {
        Answer {
            group_id: group.into(),
            review_id: format!("r{review}"),
            review_index: review,
            question_used: "q".into(),
            text: text.into(),
            confidence,
        }
    }

    fn reviews(n: usize) -> Vec<Review> {
        (0..n).map(|i| Review::new(format!("r{i}"), i, format!("Review {i} says the noodles were good."))).collect()
    }

    struct Counting {
        calls: AtomicUsize,
        fail_every: usize,
    }

    impl AnswerProvider for Counting {
        fn answer(&self, query: &Query<'_>) -> Result<Option<Span>> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if self.fail_every > 0 && query.question.ends_with('!') {
                return Err(Error::Transport(format!("call {n}")));
            }
            if query.question.starts_with("none") {
                return Ok(None);
            }
            Ok(Some(Span {
                text: "noodles".into(),
                confidence: 0.5,
            }))
        }
    }

    #[test]
    fn call_count_is_reviews_times_paraphrases() {
        let groups = vec![
            QuestionGroup {
                id: "a".into(),
                original: "q1".into(),
                paraphrases: vec!["q1".into(), "q2".into(), "q3".into()],
            },
            QuestionGroup::single("b", "none here"),
        ];
        let p = Counting {
            calls: AtomicUsize::new(0),
            fail_every: 0,
        };
        let c = collect_answers(&reviews(4), &groups, &p, 3).unwrap();
        assert_eq!(c.calls, 4 * 4);
        assert_eq!(p.calls.load(Ordering::SeqCst), 16);
        assert_eq!(c.answers.len(), 12);
        assert!(c.answers.iter().all(|a| a.group_id == "a"));
        // order normalized: review-major
        assert!(c.answers.windows(2).all(|w| w[0].review_index <= w[1].review_index));
    }

    #[test]
    fn failures_tolerated_up_to_half() {
        let group = QuestionGroup {
            id: "g".into(),
            original: "ok".into(),
            paraphrases: vec!["ok".into(), "bad!".into()],
        };
        let p = Counting {
            calls: AtomicUsize::new(0),
            fail_every: 1,
        };
        let c = collect_answers(&reviews(3), std::slice::from_ref(&group), &p, 2).unwrap();
        assert_eq!(c.failures.len(), 3);
        assert_eq!(c.answers.len(), 3);

        let group = QuestionGroup {
            id: "g".into(),
            original: "ok".into(),
            paraphrases: vec!["ok".into(), "bad!".into(), "worse!".into()],
        };
        let err = collect_answers(&reviews(3), &[group], &p, 2).unwrap_err();
        assert!(matches!(err, Error::ProviderFailure { failed: 6, total: 9 }));
    }

    #[test]
    fn collect_rejects_empty_inputs() {
        let p = FixtureProvider::default();
        assert!(collect_answers(&[], &[QuestionGroup::single("g", "q")], &p, 1).is_err());
        assert!(collect_answers(&reviews(1), &[], &p, 1).is_err());
    }

    #[test]
    fn filter_drops_blank_and_punctuation() {
        let out = filter_answers(&[
            answer(0, "g", "", 1.0),
            answer(0, "g", ".", 1.0),
            answer(0, "g", "  ", 1.0),
            answer(0, "g", "mango", 1.0),
        ]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].text, "mango");
    }

    #[test]
    fn filter_dedups_within_review_only() {
        let out = filter_answers(&[
            answer(0, "g", "The appetizers", 0.4),
            answer(0, "g", "the appetizers", 0.9),
            answer(1, "g", "The appetizers", 0.3),
            answer(0, "h", "The appetizers", 0.3),
        ]);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].text, "the appetizers");
        assert_eq!(out[0].confidence, 0.9);
        assert_eq!(out[1].group_id, "h");
        assert_eq!(out[2].review_index, 1);
    }

    #[test]
    fn question_group_normalization() {
        let g = QuestionGroup {
            id: "x".into(),
            original: "What?".into(),
            paraphrases: vec!["Which?".into()],
        }
        .normalized()
        .unwrap();
        assert_eq!(g.paraphrases, vec!["What?", "Which?"]);
        let blank = QuestionGroup::single("y", " ").normalized();
        assert!(blank.is_err());
    }

    #[test]
    fn single_answer_is_one_cluster() {
        let e = HashEmbedder::new(16, 2, 0).unwrap();
        let a = vec![answer(3, "g", "pumpkin sticky rice", 0.7)];
        let set = cluster_answers("g", &a, &e, &ClusterParams::default()).unwrap();
        assert_eq!(set.clusters.len(), 1);
        assert_eq!(set.clusters[0].tag_text, "pumpkin sticky rice");
        assert_eq!(set.clusters[0].member_count, 1);
        assert!(set.modularity.is_none());
    }

    #[test]
    fn identical_answers_across_reviews_cluster_together() {
        let e = HashEmbedder::new(32, 2, 0).unwrap();
        let a: Vec<Answer> = (0..4)
            .map(|i| answer(i, "g", "noodles with pork and crab", 1.0))
            .chain([answer(9, "g", "mango", 1.0)])
            .collect();
        let set = cluster_answers("g", &a, &e, &ClusterParams::default()).unwrap();
        assert_eq!(set.clusters.len(), 2);
        assert_eq!(set.clusters[0].member_count, 4);
        assert_eq!(set.clusters[0].tag_text, "noodles with pork and crab");
        assert_eq!(set.clusters[1].tag_text, "mango");
        let total: usize = set.clusters.iter().map(|c| c.member_count).sum();
        assert_eq!(total, a.len());
    }

    #[test]
    fn ask_validation_and_empty_status() {
        let e = HashEmbedder::new(16, 2, 0).unwrap();
        let p = FixtureProvider::default();
        let params = ClusterParams::default();
        assert!(matches!(ask("", &reviews(1), &p, &e, &params, 3, 1), Err(Error::Config(_))));
        assert!(matches!(ask("q", &reviews(1), &p, &e, &params, 0, 1), Err(Error::Config(_))));
        let r = ask("q", &reviews(2), &p, &e, &params, 3, 1).unwrap();
        assert_eq!(r.status, AskStatus::NoAnswers);
        assert!(r.clusters.is_empty());
    }
}
