//! Criterion benchmarks for `qcausal`; see `benches/`.
