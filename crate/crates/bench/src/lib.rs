//! Criterion benchmarks for the hot paths of `resex-core`; see `benches/`.
