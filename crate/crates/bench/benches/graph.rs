use std::collections::BTreeSet;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use digrid::graph::{disjoint_paths, strong_components};
use digrid_bench::{grid_graph, outer_rays};

fn flow(c: &mut Criterion) {
    let mut group = c.benchmark_group("disjoint_paths");
    for depth in [8, 16, 32] {
        let (host, g) = grid_graph(6, depth);
        let (a, b) = outer_rays(&host, depth);
        let none = BTreeSet::new();
        group.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |bench, _| {
            bench.iter(|| disjoint_paths(&g, &a, &b, &none, usize::MAX).unwrap())
        });
    }
    group.finish();
}

fn components(c: &mut Criterion) {
    let mut group = c.benchmark_group("strong_components");
    for depth in [8, 16, 32] {
        let (_, g) = grid_graph(6, depth);
        group.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |bench, _| {
            bench.iter(|| strong_components(&g))
        });
    }
    group.finish();
}

criterion_group!(benches, flow, components);
criterion_main!(benches);
