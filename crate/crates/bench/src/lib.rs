//! Criterion benchmarks for the evaluators live in `benches/`.
