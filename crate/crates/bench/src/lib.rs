//! Benchmarks for the affhecke library; see `benches/`.
