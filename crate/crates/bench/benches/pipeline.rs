use criterion::{black_box, criterion_group, criterion_main, Criterion};
use riskdex_core::transform::quintile_matrix;
use riskdex_core::{reconcile, run_variant, validate, VariantConfig};
use riskdex_bench::fixture_bundle;

fn pipeline(c: &mut Criterion) {
    let bundle = fixture_bundle();
    let cfg = VariantConfig::default();
    let grid = VariantConfig::default_grid();

    c.bench_function("quintile_matrix", |b| {
        b.iter(|| quintile_matrix(black_box(&bundle.ps), &cfg).unwrap())
    });
    c.bench_function("run_variant", |b| {
        b.iter(|| run_variant(black_box(&bundle), &cfg).unwrap())
    });
    c.bench_function("reconcile_default_grid", |b| {
        b.iter(|| reconcile(black_box(&bundle), &grid).unwrap())
    });
    c.bench_function("validate", |b| b.iter(|| validate(black_box(&bundle))));
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
