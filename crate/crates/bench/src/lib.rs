//! Benchmark-only package; see `benches/kernel.rs`.
