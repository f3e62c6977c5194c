//! Benchmarks for the pilotwave crate live under `benches/`.
