use crate::embed::{EmbeddingProvider, SentenceEmbedding};
use crate::error::{Error, Result};
use crate::segment::Sentence;

/// Share of each token vector drawn from the token's context; the rest comes
/// from the token alone. Keeps the same word in different contexts close but
/// distinct.
const CONTEXT_WEIGHT: f64 = 0.25;

/// Offline, deterministic contextual embedder.
///
/// The vector of the token at position `p` mixes a pseudo-random vector seeded
/// by the token with one seeded by the token plus the multiset of tokens within
/// `context_window` positions of `p`. Identical (token, context) pairs always
/// map to identical vectors; a change to any in-window neighbour changes the
/// vector, a change outside the window does not.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dim: usize,
    context_window: usize,
    seed: u64,
}

impl HashEmbedder {
    pub fn new(dim: usize, context_window: usize, seed: u64) -> Result<Self> {
        if dim < 8 {
            return Err(Error::Config(format!("embedding dimension {dim} is below 8")));
        }
        Ok(HashEmbedder {
            dim,
            context_window,
            seed,
        })
    }

    pub fn context_window(&self) -> usize {
        self.context_window
    }

    pub fn embed_sentence(&self, sentence: &Sentence) -> Result<SentenceEmbedding> {
        let tokens = &sentence.tokens;
        if tokens.is_empty() {
            return Err(Error::contract(format!(
                "sentence {} has no tokens",
                sentence.sentence_ref()
            )));
        }
        let mut values = Vec::with_capacity(tokens.len() * self.dim);
        for p in 0..tokens.len() {
            let lo = p.saturating_sub(self.context_window);
            let hi = (p + self.context_window).min(tokens.len() - 1);
            let mut context: Vec<&str> = (lo..=hi)
                .filter(|&q| q != p)
                .map(|q| tokens[q].as_str())
                .collect();
            context.sort_unstable();

            let mut base = Fnv::new(self.seed);
            base.tag(b'T');
            base.write_str(&tokens[p]);
            let mut ctx = Fnv::new(self.seed);
            ctx.tag(b'C');
            ctx.write_str(&tokens[p]);
            for c in &context {
                ctx.write_str(c);
            }

            let mut base = SplitMix64(base.finish());
            let mut ctx = SplitMix64(ctx.finish());
            let start = values.len();
            for _ in 0..self.dim {
                let x = (1.0 - CONTEXT_WEIGHT) * base.next_unit() + CONTEXT_WEIGHT * ctx.next_unit();
                values.push(x);
            }
            if values[start..].iter().all(|&x| x == 0.0) {
                values[start] = 1.0;
            }
        }
        SentenceEmbedding::new(sentence.sentence_ref(), self.dim, values)
    }
}

impl EmbeddingProvider for HashEmbedder {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn embed(&self, batch: &[Sentence]) -> Result<Vec<SentenceEmbedding>> {
        batch.iter().map(|s| self.embed_sentence(s)).collect()
    }
}

/// 64-bit FNV-1a; stable across platforms and compiler versions.
struct Fnv(u64);

impl Fnv {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    fn new(seed: u64) -> Self {
        let mut h = Fnv(Self::OFFSET);
        h.write(&seed.to_le_bytes());
        h
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    fn tag(&mut self, t: u8) {
        self.write(&[t]);
    }

    /// Length-prefixed so that ("ab", "c") and ("a", "bc") hash differently.
    fn write_str(&mut self, s: &str) {
        self.write(&(s.len() as u64).to_le_bytes());
        self.write(s.as_bytes());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[-1, 1)`.
    fn next_unit(&mut self) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * u - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::cosine;
    use proptest::prelude::*;

    fn embedder() -> HashEmbedder {
        HashEmbedder::new(16, 2, 42).unwrap()
    }

    fn token_vec(e: &HashEmbedder, text: &str, pos: usize) -> Vec<f64> {
        e.embed_sentence(&Sentence::new(0, 0, text)).unwrap().token(pos).to_vec()
    }

    #[test]
    fn rejects_tiny_dimension() {
        assert!(HashEmbedder::new(7, 2, 0).is_err());
    }

    #[test]
    fn bank_depends_on_context() {
        let e = embedder();
        let river = token_vec(&e, "river bank", 1);
        let money = token_vec(&e, "money bank", 1);
        let c = cosine(&river, &money).unwrap();
        assert!(c < 1.0, "cosine {c}");
        // same word keeps most of its identity
        assert!(c > 0.5, "cosine {c}");
    }

    #[test]
    fn deterministic_bitwise() {
        let e = embedder();
        let s = Sentence::new(2, 1, "The pad thai was excellent and fresh");
        let a = e.embed_sentence(&s).unwrap();
        let b = e.embed_sentence(&s).unwrap();
        assert_eq!(a, b);
        let other_instance = HashEmbedder::new(16, 2, 42).unwrap();
        assert_eq!(other_instance.embed_sentence(&s).unwrap(), a);
    }

    #[test]
    fn default_dimension_in_range() {
        let e = HashEmbedder::new(768, 2, 1).unwrap();
        let emb = e.embed_sentence(&Sentence::new(0, 0, "great food nice staff")).unwrap();
        assert_eq!(emb.len(), 4);
        assert!(emb.values().iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn seed_changes_vectors() {
        let a = HashEmbedder::new(16, 2, 1).unwrap();
        let b = HashEmbedder::new(16, 2, 2).unwrap();
        assert_ne!(token_vec(&a, "great food", 0), token_vec(&b, "great food", 0));
    }

    proptest! {
        #[test]
        fn contextuality(
            words in proptest::collection::vec("[a-e]{1,2}", 7..10),
            replacement in "[x-z]{1,2}",
            window in 0usize..3,
        ) {
            let e = HashEmbedder::new(16, window, 9).unwrap();
            let p = 3;
            let base = words.join(" ");
            let v = token_vec(&e, &base, p);
            for q in 0..words.len() {
                if q == p {
                    continue;
                }
                let mut changed = words.clone();
                changed[q] = replacement.clone();
                let w = token_vec(&e, &changed.join(" "), p);
                if p.abs_diff(q) <= window {
                    prop_assert_ne!(&v, &w);
                } else {
                    prop_assert_eq!(&v, &w);
                }
            }
        }

        #[test]
        fn vectors_in_range(text in "[a-z]{1,5}( [a-z]{1,5}){0,8}", seed in any::<u64>()) {
            let e = HashEmbedder::new(8, 2, seed).unwrap();
            let emb = e.embed_sentence(&Sentence::new(0, 0, text.clone())).unwrap();
            prop_assert_eq!(emb.len(), crate::segment::tokenize(&text).len());
            prop_assert!(emb.values().iter().all(|x| (-1.0..=1.0).contains(x)));
        }
    }
}
