//! Criterion benchmarks for `ldsp-core`; see `benches/edi.rs`.
//!
//! Run with `cargo bench -p ldsp-bench`.
