//! Criterion benchmarks for revsum live under `benches/`.
