//! Criterion benchmarks for `foxh-core`; see `benches/`.
