//! Cosine similarity between sentences of possibly different lengths.
//!
//! Two sentences of `N >= M` tokens are compared by sliding an `M`-token window
//! over the longer one. Every window position `k` in `0..=N-M` is scored, so
//! `N - M + 1` comparisons are made and both boundary windows are included;
//! the best window score is the sentence similarity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::SentenceEmbedding;
use crate::error::{Error, Result};
use crate::segment::SentenceRef;

/// Above this many components, dot products use compensated summation.
const COMPENSATED_THRESHOLD: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub a: SentenceRef,
    pub b: SentenceRef,
    pub sigma: f64,
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    if u.len() <= COMPENSATED_THRESHOLD {
        return u.iter().zip(v).map(|(x, y)| x * y).sum();
    }
    // Neumaier summation
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for (x, y) in u.iter().zip(v) {
        let term = x * y;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `dot(u, v) / (|u| |v|)`, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::contract(format!(
            "cosine of vectors with lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    if u.is_empty() {
        return Err(Error::contract("cosine of empty vectors"));
    }
    let nu = dot(u, u).sqrt();
    let nv = dot(v, v).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::contract("cosine of a zero-norm vector"));
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Token vectors `[start, start + count)` concatenated, as one slice of
/// length `dim * count`.
pub fn flatten(e: &SentenceEmbedding, start: usize, count: usize) -> Result<&[f64]> {
    if count == 0 {
        return Err(Error::contract("flatten with an empty window"));
    }
    if start.checked_add(count).is_none_or(|end| end > e.len()) {
        return Err(Error::contract(format!(
            "window [{start}, {start}+{count}) outside {} tokens",
            e.len()
        )));
    }
    let d = e.dim();
    Ok(&e.values()[start * d..(start + count) * d])
}

/// Best sliding-window offset into the longer embedding and its score.
///
/// Returns `(offset, sigma)`; on ties the smallest offset wins.
pub fn best_window(e1: &SentenceEmbedding, e2: &SentenceEmbedding) -> Result<(usize, f64)> {
    if e1.is_empty() || e2.is_empty() {
        return Err(Error::contract("similarity of an empty embedding"));
    }
    if e1.dim() != e2.dim() {
        return Err(Error::contract(format!(
            "dimension mismatch {} vs {}",
            e1.dim(),
            e2.dim()
        )));
    }
    let (long, short) = if e1.len() >= e2.len() { (e1, e2) } else { (e2, e1) };
    let m = short.len();
    let probe = flatten(short, 0, m)?;
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..=(long.len() - m) {
        let s = cosine(flatten(long, k, m)?, probe)?;
        if s > best.1 {
            best = (k, s);
        }
    }
    Ok(best)
}

pub fn sentence_similarity(e1: &SentenceEmbedding, e2: &SentenceEmbedding) -> Result<SimilarityScore> {
    let (_, sigma) = best_window(e1, e2)?;
    Ok(SimilarityScore {
        a: e1.sentence,
        b: e2.sentence,
        sigma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

fn pair_score(embeddings: &[SentenceEmbedding], i: usize, j: usize) -> Result<SimilarityScore> {
    sentence_similarity(&embeddings[i], &embeddings[j]).map_err(|e| Error::Pair {
        a: embeddings[i].sentence,
        b: embeddings[j].sentence,
        source: Box::new(e),
    })
}

/// One score per unordered pair, ordered `(0,1), (0,2), ..., (n-2,n-1)`.
pub fn pairwise_similarities(embeddings: &[SentenceEmbedding]) -> Result<Vec<SimilarityScore>> {
    pairwise_similarities_with(embeddings, Execution::Parallel)
}

pub fn pairwise_similarities_with(
    embeddings: &[SentenceEmbedding],
    execution: Execution,
) -> Result<Vec<SimilarityScore>> {
    let n = embeddings.len();
    if n < 2 {
        return Err(Error::contract(format!(
            "pairwise similarity needs at least 2 embeddings, got {n}"
        )));
    }
    let row = |i: usize| -> Result<Vec<SimilarityScore>> {
        (i + 1..n).map(|j| pair_score(embeddings, i, j)).collect()
    };
    let rows: Vec<Vec<SimilarityScore>> = match execution {
        Execution::Sequential => (0..n - 1).map(row).collect::<Result<_>>()?,
        Execution::Parallel => (0..n - 1).into_par_iter().map(row).collect::<Result<_>>()?,
    };
    Ok(rows.into_iter().flatten().collect())
}
