use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qstree::census::{build_census_with, CensusOptions};
use qstree::fixtures::{bounded, ex_basic};
use qstree::word::word_fixture;
use qstree::{build_census, recurrence_profile};

fn census(c: &mut Criterion) {
    let mut g = c.benchmark_group("census");
    for fx in bounded() {
        g.bench_with_input(BenchmarkId::new("n=12", &fx.name), &fx.spec, |b, s| {
            b.iter(|| build_census(black_box(s), 12).unwrap())
        });
    }
    g.finish();
}

fn parallelism(c: &mut Criterion) {
    let spec = ex_basic(6);
    let mut g = c.benchmark_group("ex-basic(6) n=16");
    for parallel in [false, true] {
        let opts = CensusOptions { parallel, ..CensusOptions::default() };
        g.bench_function(if parallel { "parallel" } else { "serial" }, |b| {
            b.iter(|| build_census_with(black_box(&spec), 16, opts).unwrap())
        });
    }
    g.finish();
}

fn recurrence(c: &mut Criterion) {
    let mut g = c.benchmark_group("recurrence");
    g.sample_size(10);
    for fx in bounded() {
        g.bench_with_input(BenchmarkId::new("n<=8", &fx.name), &fx.spec, |b, s| {
            b.iter(|| recurrence_profile(black_box(s), 8, true).unwrap())
        });
    }
    g.finish();
}

fn word(c: &mut Criterion) {
    let mut g = c.benchmark_group("word");
    g.sample_size(10);
    g.bench_function("word(9) n<=6", |b| b.iter(|| word_fixture(black_box(9), 6).unwrap()));
    g.finish();
}

criterion_group!(benches, census, parallelism, recurrence, word);
criterion_main!(benches);
