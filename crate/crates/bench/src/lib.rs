//! Criterion benchmarks for the distance solvers; see `benches/`.
