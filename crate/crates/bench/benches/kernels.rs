use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idealcalc::derivations::norm_estimate;
use idealcalc::multipliers::{estimate_multiplier_norm_seq, Strategy};
use idealcalc::operators::singular_values;
use idealcalc::{DerivationSpec, SpaceSpec};
use idealcalc_bench::{budget, matrix, sequence};
use std::hint::black_box;

fn svd(c: &mut Criterion) {
    let mut g = c.benchmark_group("singular_values");
    for n in [4, 8, 16, 64] {
        let x = matrix(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| singular_values(black_box(x)).unwrap())
        });
    }
    g.finish();
}

fn multiplier_search(c: &mut Criterion) {
    let f = SpaceSpec::schatten(1.0).unwrap();
    let g = SpaceSpec::schatten(2.0).unwrap();
    let mut group = c.benchmark_group("multiplier_seq_search");
    for len in [4, 8] {
        let xi = sequence(len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &xi, |b, xi| {
            b.iter(|| {
                estimate_multiplier_norm_seq(&f, &g, black_box(xi), &budget(), Strategy::Search)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn derivation_estimate(c: &mut Criterion) {
    let i = SpaceSpec::schatten(2.0).unwrap();
    let j = SpaceSpec::schatten(1.0).unwrap();
    let mut group = c.benchmark_group("derivation_norm_estimate");
    group.sample_size(10);
    for n in [4, 8] {
        let d = DerivationSpec::new(matrix(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &d, |b, d| {
            b.iter(|| norm_estimate(black_box(d), &i, &j, &budget()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, svd, multiplier_search, derivation_estimate);
criterion_main!(benches);
