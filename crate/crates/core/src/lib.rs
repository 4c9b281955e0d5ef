//! Review summarization and multi-answer extraction over sentence similarity
//! graphs.
//!
//! Reviews are split into sentences, embedded token by token, compared with a
//! sliding-window cosine, and linked whenever similarity clears a threshold.
//! Louvain modularity maximization groups the sentences into communities and
//! weighted TextRank picks the sentence that tags each one. The same graph
//! machinery clusters answers gathered by fanning paraphrased questions over
//! every review.

pub mod embed;
pub mod error;
pub mod graph;
mod http;
pub mod json;
pub mod pipeline;
pub mod qa;
pub mod ranking;
pub mod segment;
pub mod similarity;

pub use embed::{EmbeddingProvider, HashEmbedder, RemoteEmbedder, SentenceEmbedding};
pub use error::{Error, Result};
pub use graph::{build_graph, louvain, modularity, Partition, SimilarityGraph};
pub use http::RemoteConfig;
pub use qa::{AnswerProvider, FixtureProvider, QuestionGroup, RemoteAnswerProvider};
pub use ranking::{tag_communities, textrank, CommunityTag, CorrelationScores};
pub use segment::{Review, Sentence, SentenceRef};
pub use similarity::{cosine, sentence_similarity, SimilarityScore};
