use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ksnorm::{hkl_norm, ks2_inner, ksp_norm, ksp_weak_norm, FamilyKind, NormTag, PExponent};
use ksnorm_bench::model;

fn ks_norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("ksp_norm");
    let p = PExponent::Finite(2.0);
    for atoms in [4, 8, 12] {
        let (mu, f, fam, d) = model(atoms, 2, NormTag::LInf, FamilyKind::AllSubsets);
        group.bench_with_input(BenchmarkId::new("all_subsets", atoms), &atoms, |b, _| {
            b.iter(|| ksp_norm(&f, &mu, p, &fam, &d, false).unwrap().value)
        });
    }
    let (mu, f, fam, d) = model(64, 3, NormTag::L2, FamilyKind::Dyadic);
    group.bench_function("dyadic/64", |b| b.iter(|| ksp_norm(&f, &mu, p, &fam, &d, false).unwrap().value));
    group.bench_function("weak_dyadic/64", |b| b.iter(|| ksp_weak_norm(&f, &mu, p, &fam, &d, false).unwrap().value));
    group.bench_function("inner_dyadic/64", |b| b.iter(|| ks2_inner(&f, &f, &mu, &fam, &d).unwrap()));
    group.bench_function("alexiewicz/64", |b| b.iter(|| hkl_norm(&f, &mu, &d).unwrap().value));
    group.finish();
}

criterion_group!(benches, ks_norms);
criterion_main!(benches);
