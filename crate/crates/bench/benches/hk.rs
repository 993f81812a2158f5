use criterion::{criterion_group, criterion_main, Criterion};
use ksnorm::Integrand;

fn builtins(c: &mut Criterion) {
    let mut group = c.benchmark_group("hk_integrate");
    group.sample_size(10);
    let cases = [
        Integrand::Poly { coeffs: vec![1.0, -3.0, 0.0, 4.0] },
        Integrand::SqrtSingular { center: 0.0 },
        Integrand::OscillatoryDerivative { center: 0.0 },
    ];
    for f in cases {
        for tol in [1e-4, 1e-6] {
            group.bench_function(format!("{}/{tol:e}", f.name()), |b| b.iter(|| f.integrate(0.0, 1.0, tol).unwrap().value));
        }
    }
    group.finish();
}

criterion_group!(benches, builtins);
criterion_main!(benches);
