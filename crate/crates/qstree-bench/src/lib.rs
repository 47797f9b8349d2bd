//! Criterion benchmarks for `qstree`; see `benches/`.
