//! Per-token contextual vectors behind a pluggable [`EmbeddingProvider`].

mod hash;
mod remote;

use rayon::prelude::*;

pub use hash::HashEmbedder;
pub use remote::{RemoteConfig, RemoteEmbedder};

use crate::error::{Error, Result};
use crate::segment::{Sentence, SentenceRef};

pub const DEFAULT_DIMENSION: usize = 768;
pub const DEFAULT_CONTEXT_WINDOW: usize = 2;

/// Token vectors of one sentence, stored row-major: token `t` occupies
/// `values[t * dim..(t + 1) * dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceEmbedding {
    pub sentence: SentenceRef,
    dim: usize,
    values: Vec<f64>,
}

impl SentenceEmbedding {
    /// Checks the token-vector invariants: `dim > 0`, a whole number of
    /// tokens, every component finite and within `[-1, 1]`, no all-zero token.
    pub fn new(sentence: SentenceRef, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.is_empty() || !values.len().is_multiple_of(dim) {
            return Err(Error::contract(format!(
                "embedding for {sentence}: {} values is not a positive multiple of dimension {dim}",
                values.len()
            )));
        }
        for (t, row) in values.chunks_exact(dim).enumerate() {
            if let Some(bad) = row.iter().find(|x| !x.is_finite() || x.abs() > 1.0) {
                return Err(Error::contract(format!(
                    "embedding for {sentence}: token {t} has component {bad} outside [-1, 1]"
                )));
            }
            if row.iter().all(|&x| x == 0.0) {
                return Err(Error::contract(format!(
                    "embedding for {sentence}: token {t} is the zero vector"
                )));
            }
        }
        Ok(SentenceEmbedding {
            sentence,
            dim,
            values,
        })
    }

    /// Builds an embedding from separate token vectors.
    pub fn from_tokens(sentence: SentenceRef, tokens: &[Vec<f64>]) -> Result<Self> {
        let dim = tokens.first().map_or(0, Vec::len);
        if tokens.iter().any(|t| t.len() != dim) {
            return Err(Error::contract(format!(
                "embedding for {sentence}: token vectors differ in length"
            )));
        }
        Self::new(sentence, dim, tokens.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of token vectors.
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn token(&self, t: usize) -> &[f64] {
        &self.values[t * self.dim..(t + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Maps sentences to per-token vectors.
///
/// Implementations must be deterministic for a fixed configuration and return
/// one embedding per input sentence, in input order.
pub trait EmbeddingProvider: Send + Sync {
    fn dimension(&self) -> usize;

    fn embed(&self, batch: &[Sentence]) -> Result<Vec<SentenceEmbedding>>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for &P {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn embed(&self, batch: &[Sentence]) -> Result<Vec<SentenceEmbedding>> {
        (**self).embed(batch)
    }
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for Box<P> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn embed(&self, batch: &[Sentence]) -> Result<Vec<SentenceEmbedding>> {
        (**self).embed(batch)
    }
}

/// Embeds a whole corpus in batches of `batch_size`, running batches in
/// parallel. Output order matches `sentences`, and every embedding is checked
/// against the provider's dimension.
pub fn embed_all<P: EmbeddingProvider + ?Sized>(
    provider: &P,
    sentences: &[Sentence],
    batch_size: usize,
) -> Result<Vec<SentenceEmbedding>> {
    let batch_size = batch_size.max(1);
    let batches: Vec<Vec<SentenceEmbedding>> = sentences
        .par_chunks(batch_size)
        .map(|chunk| {
            let out = provider.embed(chunk)?;
            if out.len() != chunk.len() {
                return Err(Error::protocol(
                    None,
                    format!("provider returned {} embeddings for {} sentences", out.len(), chunk.len()),
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let dim = provider.dimension();
    let all: Vec<SentenceEmbedding> = batches.into_iter().flatten().collect();
    if let Some(e) = all.iter().find(|e| e.dim() != dim) {
        return Err(Error::protocol(
            Some(e.sentence.to_string()),
            format!("dimension {} differs from provider dimension {dim}", e.dim()),
        ));
    }
    Ok(all)
}
