use criterion::{criterion_group, criterion_main, Criterion};
use digrid::analysis::main_pipeline;
use digrid::catalog::{canonical_grid, chain_dinf};
use digrid::grids::{natural_certificate, validate_grid};
use digrid::necklaces::{necklace_grid_certificate, validate_necklace_grid, NecklaceKind};
use digrid::rays::build_spine;
use digrid::GridKind;

fn recognizers(c: &mut Criterion) {
    let host = canonical_grid(GridKind::OutwardDDQG, 6);
    let (g, cert) = natural_certificate(&host, 6, 14).unwrap();
    c.bench_function("validate_grid/outward-6", |b| {
        b.iter(|| validate_grid(&g, &cert, &host, 14))
    });
    let (g, cert) = necklace_grid_certificate(NecklaceKind::BidirectedNG, 6, 14).unwrap();
    c.bench_function("validate_necklace_grid/bidirected-6", |b| {
        b.iter(|| validate_necklace_grid(&g, &cert))
    });
}

fn builders(c: &mut Criterion) {
    let host = chain_dinf(GridKind::OutwardDDQG);
    c.bench_function("build_spine/chain-out-12", |b| {
        b.iter(|| build_spine(&host, 12, 16).unwrap())
    });
    let host = canonical_grid(GridKind::BidirectedQG, 4);
    let mut group = c.benchmark_group("main_pipeline");
    group.sample_size(10);
    group.bench_function("bidirected-3", |b| {
        b.iter(|| main_pipeline(&host, 3, 12, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, recognizers, builders);
criterion_main!(benches);
