use std::hint::black_box;

use comploc::{
    build_hw, build_maj, exact_cc, info_report, verify_against, Domain, NamedFunction,
    SearchBudget, TruthTable,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn verify(c: &mut Criterion) {
    let comp = build_hw(16, 4).unwrap();
    let target = TruthTable::named(NamedFunction::Hw, 16).unwrap();
    let full = Domain::full(16).unwrap();
    c.bench_function("verify hw(16,4)", |b| {
        b.iter(|| verify_against(black_box(&comp), &target, &full).unwrap())
    });
}

fn info(c: &mut Criterion) {
    let comp = build_hw(12, 3).unwrap();
    let full = Domain::full(12).unwrap();
    c.bench_function("info_report hw(12,3)", |b| {
        b.iter(|| info_report(black_box(&comp), &full).unwrap())
    });
}

fn build(c: &mut Criterion) {
    c.bench_function("build_maj(14,3)", |b| {
        b.iter(|| build_maj(black_box(14), 3).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let maj4 = TruthTable::named(NamedFunction::Maj, 4).unwrap();
    let budget = SearchBudget::default();
    c.bench_function("exact_cc maj4 k=2", |b| {
        b.iter(|| exact_cc(black_box(&maj4), 2, &budget).unwrap())
    });
}

criterion_group!(benches, verify, info, build, search);
criterion_main!(benches);
