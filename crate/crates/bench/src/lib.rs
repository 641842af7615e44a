//! Benchmark-only crate; see `benches/functionals.rs`.
