//! Criterion benchmarks for kappa-core live under `benches/`.
