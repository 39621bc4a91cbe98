//! Criterion benchmarks for `dtpo-core` live in `benches/`.
