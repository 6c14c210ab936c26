//! Criterion benchmarks for the operator hot paths; see `benches/operators.rs`.
