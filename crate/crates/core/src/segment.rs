//! Review ingestion, sentence splitting and short-fragment merging.
//!
//! Boundary rules are deliberately simple: `.`, `!` and `?` (and runs of them)
//! always end a sentence, as does any run of newlines. There is no abbreviation
//! list, so "Dr. Smith" splits in two; the short fragment is then healed by
//! [`merge_short`].

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default minimum sentence length, in tokens, below which a fragment is merged.
pub const DEFAULT_MIN_TOKENS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    /// Position of the review in its corpus.
    pub index: usize,
    pub text: String,
    pub rating: Option<f64>,
}

impl Review {
    pub fn new(id: impl Into<String>, index: usize, text: impl Into<String>) -> Self {
        Review {
            id: id.into(),
            index,
            text: text.into(),
            rating: None,
        }
    }
}

/// `(review index, sentence index)`; the identity of a graph node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SentenceRef {
    pub review: usize,
    pub sentence: usize,
}

impl SentenceRef {
    pub const fn new(review: usize, sentence: usize) -> Self {
        SentenceRef { review, sentence }
    }
}

impl fmt::Display for SentenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.review, self.sentence)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub review_index: usize,
    pub sentence_index: usize,
    pub text: String,
    pub tokens: Vec<String>,
}

impl Sentence {
    /// Builds a sentence, tokenizing `text`.
    pub fn new(review_index: usize, sentence_index: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Sentence {
            review_index,
            sentence_index,
            text,
            tokens,
        }
    }

    pub fn sentence_ref(&self) -> SentenceRef {
        SentenceRef::new(self.review_index, self.sentence_index)
    }
}

/// Lowercased word tokens with punctuation stripped.
///
/// Words are maximal runs of alphanumeric characters and apostrophes; leading
/// and trailing apostrophes are trimmed, so `"'great'"` gives `great` while
/// `"I've"` stays one token.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|w| w.trim_matches('\''))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Raw boundary split; segments are trimmed and never empty.
fn raw_segments(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let end = if is_terminator(c) {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if !is_terminator(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            Some((end, end))
        } else if c == '\n' || c == '\r' {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if d != '\n' && d != '\r' {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            // the newline run itself is not part of the sentence
            Some((i, end))
        } else {
            None
        };
        if let Some((seg_end, next_start)) = end {
            let seg = text[start..seg_end].trim();
            if !seg.is_empty() {
                out.push(seg);
            }
            start = next_start;
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

/// Splits a review into sentences with consecutive indices starting at 0.
///
/// Segments without any word token (a stray `"..."`, an emoji line) are glued
/// onto the preceding sentence, or onto the following one at the start of the
/// review, so every emitted sentence has at least one token.
pub fn split_review(review: &Review) -> Result<Vec<Sentence>> {
    if review.text.trim().is_empty() {
        return Err(Error::UnusableReview {
            id: review.id.clone(),
            reason: "text is empty or whitespace".into(),
        });
    }
    let mut texts: Vec<String> = Vec::new();
    let mut pending_prefix: Option<String> = None;
    for seg in raw_segments(&review.text) {
        let has_tokens = !tokenize(seg).is_empty();
        if !has_tokens {
            match texts.last_mut() {
                Some(prev) => {
                    prev.push(' ');
                    prev.push_str(seg);
                }
                None => {
                    let p = pending_prefix.get_or_insert_with(String::new);
                    if !p.is_empty() {
                        p.push(' ');
                    }
                    p.push_str(seg);
                }
            }
            continue;
        }
        match pending_prefix.take() {
            Some(p) => texts.push(format!("{p} {seg}")),
            None => texts.push(seg.to_string()),
        }
    }
    if texts.is_empty() {
        return Err(Error::UnusableReview {
            id: review.id.clone(),
            reason: "no word tokens".into(),
        });
    }
    Ok(texts
        .into_iter()
        .enumerate()
        .map(|(j, t)| Sentence::new(review.index, j, t))
        .collect())
}

/// Merges sentences shorter than `min_tokens` into a neighbour.
///
/// A short sentence is appended to its predecessor; a short first sentence is
/// prepended to its successor. Indices are reassigned consecutively. The result
/// has every sentence at or above `min_tokens` unless the whole review is
/// shorter, in which case it is a single sentence.
pub fn merge_short(sentences: &[Sentence], min_tokens: usize) -> Vec<Sentence> {
    let Some(first) = sentences.first() else {
        return Vec::new();
    };
    let review_index = first.review_index;
    let mut merged: Vec<(String, Vec<String>)> = Vec::with_capacity(sentences.len());
    for s in sentences {
        match merged.last_mut() {
            Some((text, tokens)) if s.tokens.len() < min_tokens => {
                text.push(' ');
                text.push_str(&s.text);
                tokens.extend(s.tokens.iter().cloned());
            }
            _ => merged.push((s.text.clone(), s.tokens.clone())),
        }
    }
    if merged.len() > 1 && merged[0].1.len() < min_tokens {
        let (text, mut tokens) = merged.remove(0);
        let next = &mut merged[0];
        next.0 = format!("{text} {}", next.0);
        tokens.append(&mut next.1);
        next.1 = tokens;
    }
    merged
        .into_iter()
        .enumerate()
        .map(|(j, (text, tokens))| Sentence {
            review_index,
            sentence_index: j,
            text,
            tokens,
        })
        .collect()
}

/// Splits and merges every review of a corpus, in corpus order.
pub fn segment_corpus(reviews: &[Review], min_tokens: usize) -> Result<Vec<Sentence>> {
    if min_tokens == 0 {
        return Err(Error::Config("min_tokens must be at least 1".into()));
    }
    let mut out = Vec::new();
    for review in reviews {
        let split = split_review(review)?;
        out.extend(merge_short(&split, min_tokens));
    }
    Ok(out)
}

#[derive(Deserialize)]
struct ReviewLine {
    id: String,
    text: String,
    #[serde(default)]
    rating: Option<f64>,
}

/// Reads a JSON Lines corpus: one `{"id", "text", "rating"}` object per line.
///
/// Blank lines are skipped; review indices follow line order among non-blank
/// lines. Fails on an empty corpus, a blank review text or a repeated id.
pub fn read_reviews<R: BufRead>(reader: R) -> Result<Vec<Review>> {
    let mut reviews = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ReviewLine = serde_json::from_str(&line)
            .map_err(|e| Error::Input(format!("line {}: {e}", lineno + 1)))?;
        if parsed.text.trim().is_empty() {
            return Err(Error::UnusableReview {
                id: parsed.id,
                reason: "text is empty or whitespace".into(),
            });
        }
        if !seen.insert(parsed.id.clone()) {
            return Err(Error::Input(format!("duplicate review id {:?}", parsed.id)));
        }
        reviews.push(Review {
            id: parsed.id,
            index: reviews.len(),
            text: parsed.text,
            rating: parsed.rating,
        });
    }
    if reviews.is_empty() {
        return Err(Error::Input("corpus contains no reviews".into()));
    }
    Ok(reviews)
}

pub fn load_reviews(path: &Path) -> Result<Vec<Review>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
    read_reviews(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sents(texts: &[&str]) -> Vec<Sentence> {
        texts
            .iter()
            .enumerate()
            .map(|(j, t)| Sentence::new(0, j, *t))
            .collect()
    }

    fn texts(s: &[Sentence]) -> Vec<&str> {
        s.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Great food!"), vec!["great", "food"]);
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("The delivery is efficient."),
            vec!["the", "delivery", "is", "efficient"]
        );
        assert_eq!(tokenize("I've tried 'it'"), vec!["i've", "tried", "it"]);
    }

    #[test]
    fn split_examples() {
        let r = Review::new("a", 0, "Great food. Nice staff.");
        assert_eq!(texts(&split_review(&r).unwrap()), ["Great food.", "Nice staff."]);

        let r = Review::new("b", 0, "Loved it");
        assert_eq!(texts(&split_review(&r).unwrap()), ["Loved it"]);

        let r = Review::new("c", 3, "Wow! Amazing! Go.");
        let out = split_review(&r).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().enumerate().all(|(j, s)| s.sentence_index == j && s.review_index == 3));
    }

    #[test]
    fn split_on_newlines_and_terminator_runs() {
        let r = Review::new("a", 0, "So good!!! Really\n\nwould return?!");
        assert_eq!(
            texts(&split_review(&r).unwrap()),
            ["So good!!!", "Really", "would return?!"]
        );
    }

    #[test]
    fn tokenless_segments_are_absorbed() {
        let r = Review::new("a", 0, "... Great place. :)\n...");
        assert_eq!(texts(&split_review(&r).unwrap()), ["... Great place. :) ..."]);
    }

    #[test]
    fn blank_review_is_unusable() {
        let r = Review::new("x", 0, "  \n\t ");
        assert!(matches!(split_review(&r), Err(Error::UnusableReview { .. })));
        let r = Review::new("y", 0, "?!.");
        assert!(matches!(split_review(&r), Err(Error::UnusableReview { .. })));
    }

    #[test]
    fn merge_examples() {
        let out = merge_short(&sents(&["Wow!", "The pad thai was excellent."]), 3);
        assert_eq!(texts(&out), ["Wow! The pad thai was excellent."]);

        let out = merge_short(&sents(&["The pad thai was excellent.", "Yum."]), 3);
        assert_eq!(texts(&out), ["The pad thai was excellent. Yum."]);

        let input = sents(&["The food was good.", "The staff was kind."]);
        assert_eq!(merge_short(&input, 3), input);
    }

    #[test]
    fn merge_whole_review_below_threshold() {
        let out = merge_short(&sents(&["Wow!", "Yes."]), 4);
        assert_eq!(texts(&out), ["Wow! Yes."]);
        assert_eq!(out[0].tokens, ["wow", "yes"]);
    }

    #[test]
    fn merge_chain_of_short_leading_fragments() {
        let out = merge_short(&sents(&["Wow!", "Yes!", "The pad thai was excellent.", "Ok."]), 3);
        assert_eq!(
            texts(&out),
            ["Wow! Yes! The pad thai was excellent. Ok."]
        );
    }

    #[test]
    fn read_reviews_validates() {
        let good = "{\"id\":\"a\",\"text\":\"Nice.\",\"rating\":4.5}\n\n{\"id\":\"b\",\"text\":\"Bad.\",\"rating\":null}\n";
        let r = read_reviews(good.as_bytes()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].index, 1);
        assert_eq!(r[0].rating, Some(4.5));

        assert!(matches!(read_reviews("".as_bytes()), Err(Error::Input(_))));
        let dup = "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}";
        assert!(matches!(read_reviews(dup.as_bytes()), Err(Error::Input(_))));
        let blank = "{\"id\":\"a\",\"text\":\"  \"}";
        assert!(matches!(read_reviews(blank.as_bytes()), Err(Error::UnusableReview { .. })));
        assert!(matches!(read_reviews("not json".as_bytes()), Err(Error::Input(_))));
    }

    fn strip_ws(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    proptest! {
        #[test]
        fn split_reproduces_text(text in "[a-zA-Z .!?\n,']{1,80}") {
            prop_assume!(!tokenize(&text).is_empty());
            let r = Review::new("p", 0, text.clone());
            let out = split_review(&r).unwrap();
            let joined = out.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ");
            prop_assert_eq!(strip_ws(&joined), strip_ws(&text));
            prop_assert!(out.iter().all(|s| !s.tokens.is_empty() && s.tokens == tokenize(&s.text)));
        }

        #[test]
        fn merge_is_idempotent_and_order_preserving(
            text in "[a-z]{1,6}( [a-z]{1,6}){0,6}([.!?] [a-z]{1,6}( [a-z]{1,6}){0,6}){0,6}",
            min_tokens in 1usize..6,
        ) {
            let r = Review::new("p", 0, text);
            let split = split_review(&r).unwrap();
            let once = merge_short(&split, min_tokens);
            let twice = merge_short(&once, min_tokens);
            prop_assert_eq!(&once, &twice);

            let all: Vec<String> = split.iter().flat_map(|s| s.tokens.clone()).collect();
            let merged: Vec<String> = once.iter().flat_map(|s| s.tokens.clone()).collect();
            prop_assert_eq!(&all, &merged);

            let total = all.len();
            for s in &once {
                prop_assert!(s.tokens.len() >= min_tokens || (once.len() == 1 && total < min_tokens));
                prop_assert_eq!(&s.tokens, &tokenize(&s.text));
            }
            prop_assert!(once.iter().enumerate().all(|(j, s)| s.sentence_index == j));
        }
    }
}
