//! Test support for revsum: brute-force oracles that share no code with the
//! library, deterministic synthetic corpora, and a minimal HTTP server for
//! exercising the remote providers.

pub mod http;
pub mod oracle;
pub mod synth;

pub use oracle::WeightedEdge;
