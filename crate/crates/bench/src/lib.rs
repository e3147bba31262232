//! Benchmark crate; the benchmarks live in `benches/`.
