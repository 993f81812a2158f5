use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ksnorm::{semivariation, NormTag};
use ksnorm_bench::measure;

fn sign_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("semivariation");
    for atoms in [8, 12, 16, 20] {
        let mu = measure(atoms, 3, NormTag::L2);
        group.bench_with_input(BenchmarkId::new("ell2_dim3", atoms), &mu, |b, mu| {
            b.iter(|| semivariation(mu, mu.full()).unwrap().value)
        });
    }
    // beyond the sign budget the polytope route takes over
    let mu = measure(40, 3, NormTag::LInf);
    group.bench_function("ellinf_dim3_extreme_points/40", |b| b.iter(|| semivariation(&mu, mu.full()).unwrap().value));
    group.finish();
}

criterion_group!(benches, sign_enumeration);
criterion_main!(benches);
