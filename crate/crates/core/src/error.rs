use thiserror::Error;

use crate::segment::SentenceRef;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Input data that cannot be used (empty corpus, malformed JSON lines, blank reviews).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unusable review {id:?}: {reason}")]
    UnusableReview { id: String, reason: String },

    /// The graph has no edges, so modularity (and Louvain) is undefined.
    #[error("modularity is undefined on an edgeless graph")]
    UndefinedModularity,

    #[error("similarity between {a} and {b}: {source}")]
    Pair {
        a: SentenceRef,
        b: SentenceRef,
        #[source]
        source: Box<Error>,
    },

    /// Network-level failure talking to a remote provider; safe to retry.
    #[error("transport error: {0}")]
    Transport(String),

    /// A remote provider answered, but the payload broke the protocol.
    #[error("protocol error{}: {reason}", .item.as_ref().map(|s| format!(" ({s})")).unwrap_or_default())]
    Protocol { item: Option<String>, reason: String },

    #[error("answer provider failed on {failed} of {total} calls")]
    ProviderFailure { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn protocol(item: Option<String>, reason: impl Into<String>) -> Self {
        Error::Protocol {
            item,
            reason: reason.into(),
        }
    }

    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Transport(_))
    }
}
