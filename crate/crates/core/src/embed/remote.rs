use serde::{Deserialize, Serialize};

pub use crate::http::RemoteConfig;

use crate::embed::{EmbeddingProvider, SentenceEmbedding};
use crate::error::{Error, Result};
use crate::http::JsonClient;
use crate::segment::Sentence;

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: Vec<&'a str>,
}

#[derive(Deserialize)]
struct EmbedResponse {
    dim: usize,
    embeddings: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    tokenizations: Option<Vec<Vec<String>>>,
}

/// Client for a model server exposing `POST /embed`.
///
/// The server tokenizes on its own, so an embedding may hold a different
/// number of vectors than the sentence has local tokens. Values are validated,
/// never clamped.
#[derive(Debug)]
pub struct RemoteEmbedder {
    client: JsonClient,
    dim: usize,
}

impl RemoteEmbedder {
    pub fn new(config: RemoteConfig, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        Ok(RemoteEmbedder {
            client: JsonClient::new(config)?,
            dim,
        })
    }
}

impl EmbeddingProvider for RemoteEmbedder {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn embed(&self, batch: &[Sentence]) -> Result<Vec<SentenceEmbedding>> {
        if batch.is_empty() {
            return Err(Error::contract("remote embedding batch is empty"));
        }
        let req = EmbedRequest {
            texts: batch.iter().map(|s| s.text.as_str()).collect(),
        };
        let resp: EmbedResponse = self.client.post("embed", &req)?;
        if resp.dim != self.dim {
            return Err(Error::protocol(
                None,
                format!("server dimension {} differs from configured {}", resp.dim, self.dim),
            ));
        }
        if resp.embeddings.len() != batch.len() {
            return Err(Error::protocol(
                None,
                format!("{} embeddings returned for {} texts", resp.embeddings.len(), batch.len()),
            ));
        }
        if let Some(tok) = &resp.tokenizations {
            if tok.len() != batch.len() {
                return Err(Error::protocol(
                    None,
                    format!("{} tokenizations returned for {} texts", tok.len(), batch.len()),
                ));
            }
        }
        batch
            .iter()
            .zip(resp.embeddings)
            .enumerate()
            .map(|(i, (sentence, vectors))| {
                let sref = sentence.sentence_ref();
                let item = Some(sref.to_string());
                if vectors.is_empty() {
                    return Err(Error::protocol(item, "no token vectors"));
                }
                if let Some(tok) = &resp.tokenizations {
                    if tok[i].len() != vectors.len() {
                        return Err(Error::protocol(
                            item,
                            format!(
                                "{} vectors for {} server tokens",
                                vectors.len(),
                                tok[i].len()
                            ),
                        ));
                    }
                }
                if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
                    return Err(Error::protocol(
                        item,
                        format!("vector of length {} where {} was expected", v.len(), self.dim),
                    ));
                }
                SentenceEmbedding::from_tokens(sref, &vectors).map_err(|e| match e {
                    Error::Contract(reason) => Error::protocol(item, reason),
                    other => other,
                })
            })
            .collect()
    }
}
