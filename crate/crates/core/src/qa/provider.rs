use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::http::{JsonClient, RemoteConfig};

/// Separator between question and review id in fixture keys (U+241F).
pub const FIXTURE_KEY_SEPARATOR: char = '\u{241F}';

/// An extracted span and the provider's confidence in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Span {
    pub text: String,
    pub confidence: f64,
}

/// One question asked of one review.
#[derive(Debug, Clone, Copy)]
pub struct Query<'a> {
    pub question: &'a str,
    pub review_id: &'a str,
    pub context: &'a str,
}

/// Extractive question answering.
///
/// A returned span must occur verbatim in the query context; `Ok(None)` means
/// the provider found no answer. Answers must be deterministic for a fixed
/// provider configuration.
pub trait AnswerProvider: Send + Sync {
    fn answer(&self, query: &Query<'_>) -> Result<Option<Span>>;
}

impl<P: AnswerProvider + ?Sized> AnswerProvider for &P {
    fn answer(&self, query: &Query<'_>) -> Result<Option<Span>> {
        (**self).answer(query)
    }
}

impl<P: AnswerProvider + ?Sized> AnswerProvider for Box<P> {
    fn answer(&self, query: &Query<'_>) -> Result<Option<Span>> {
        (**self).answer(query)
    }
}

fn check_span(span: Span, query: &Query<'_>) -> Result<Span> {
    if !(0.0..=1.0).contains(&span.confidence) {
        return Err(Error::protocol(
            Some(query.review_id.to_string()),
            format!("confidence {} outside [0, 1]", span.confidence),
        ));
    }
    if !query.context.contains(&span.text) {
        return Err(Error::protocol(
            Some(query.review_id.to_string()),
            format!("answer {:?} is not a span of the review", span.text),
        ));
    }
    Ok(span)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FixtureEntry {
    answer: String,
    #[serde(default = "default_confidence")]
    confidence: f64,
}

fn default_confidence() -> f64 {
    1.0
}

/// Recorded answers keyed by `"<question>\u{241F}<review_id>"`; a missing key
/// is a null answer.
#[derive(Debug, Clone, Default)]
pub struct FixtureProvider {
    entries: BTreeMap<String, FixtureEntry>,
}

impl FixtureProvider {
    pub fn key(question: &str, review_id: &str) -> String {
        format!("{question}{FIXTURE_KEY_SEPARATOR}{review_id}")
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let entries: BTreeMap<String, FixtureEntry> = serde_json::from_str(json)?;
        if let Some(k) = entries.keys().find(|k| !k.contains(FIXTURE_KEY_SEPARATOR)) {
            return Err(Error::Input(format!("fixture key {k:?} lacks the U+241F separator")));
        }
        Ok(FixtureProvider { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read fixtures {}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Json(j) => Error::Input(format!("fixtures {}: {j}", path.display())),
            other => other,
        })
    }

    pub fn insert(&mut self, question: &str, review_id: &str, answer: impl Into<String>, confidence: f64) {
        self.entries.insert(
            Self::key(question, review_id),
            FixtureEntry {
                answer: answer.into(),
                confidence,
            },
        );
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl AnswerProvider for FixtureProvider {
    fn answer(&self, query: &Query<'_>) -> Result<Option<Span>> {
        let Some(entry) = self.entries.get(&Self::key(query.question, query.review_id)) else {
            return Ok(None);
        };
        let span = Span {
            text: entry.answer.clone(),
            confidence: entry.confidence,
        };
        check_span(span, query).map(Some)
    }
}

#[derive(Serialize)]
struct AnswerRequest<'a> {
    question: &'a str,
    context: &'a str,
}

#[derive(Deserialize)]
struct AnswerResponse {
    answer: Option<String>,
    score: f64,
}

/// Client for a model server exposing `POST /answer`.
#[derive(Debug)]
pub struct RemoteAnswerProvider {
    client: JsonClient,
}

impl RemoteAnswerProvider {
    pub fn new(config: RemoteConfig) -> Result<Self> {
        Ok(RemoteAnswerProvider {
            client: JsonClient::new(config)?,
        })
    }
}

impl AnswerProvider for RemoteAnswerProvider {
    fn answer(&self, query: &Query<'_>) -> Result<Option<Span>> {
        let resp: AnswerResponse = self.client.post(
            "answer",
            &AnswerRequest {
                question: query.question,
                context: query.context,
            },
        )?;
        match resp.answer {
            None => Ok(None),
            Some(text) => check_span(
                Span {
                    text,
                    confidence: resp.score,
                },
                query,
            )
            .map(Some),
        }
    }
}
