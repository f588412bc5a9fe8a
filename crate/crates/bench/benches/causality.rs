use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcausal::causality::{semicausal_test, signaling_search, unitary_product_test, Direction};
use qcausal::fixtures::{named_fixture, random_basis, semicausal_basis};
use qcausal::measurement::{measurement_channel, partition_structure, reduced_state_dichotomy};
use qcausal::random::{haar_unitary, rng};
use qcausal::report::{classify, ClassifyOptions};
use qcausal::{BiDims, Side};

fn semicausality(c: &mut Criterion) {
    let mut group = c.benchmark_group("semicausality");
    for n in [2usize, 3, 4] {
        let dims = BiDims::new(n, n).unwrap();
        let basis = random_basis(dims, &mut rng(n as u64));
        let ch = measurement_channel(&basis);
        group.bench_with_input(BenchmarkId::new("dichotomy", n), &basis, |b, basis| {
            b.iter(|| reduced_state_dichotomy(black_box(basis), Side::A))
        });
        group.bench_with_input(BenchmarkId::new("choi", n), &ch, |b, ch| {
            b.iter(|| semicausal_test(black_box(ch), Direction::BtoA))
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let dims = BiDims::new(3, 3).unwrap();
    let ch = measurement_channel(&random_basis(dims, &mut rng(1)));
    c.bench_function("signaling_search/3x3/budget8", |b| {
        b.iter(|| signaling_search(black_box(&ch), Direction::BtoA, 8, 0))
    });
}

fn structure(c: &mut Criterion) {
    let basis = semicausal_basis(BiDims::new(6, 6).unwrap(), &[3, 2, 1], &mut rng(2)).unwrap();
    c.bench_function("partition_structure/6x6", |b| {
        b.iter(|| partition_structure(black_box(&basis), Side::A).unwrap())
    });
    let u = haar_unitary(9, &mut rng(3));
    let dims = BiDims::new(3, 3).unwrap();
    c.bench_function("unitary_product_test/3x3", |b| {
        b.iter(|| unitary_product_test(black_box(&u), dims).unwrap())
    });
}

fn reports(c: &mut Criterion) {
    let opts = ClassifyOptions::default();
    let mut group = c.benchmark_group("classify");
    group.sample_size(20);
    for name in ["sorkin", "mismatch_basis", "andbox"] {
        let artifact = named_fixture(name).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| classify(black_box(&artifact), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, semicausality, search, structure, reports);
criterion_main!(benches);
