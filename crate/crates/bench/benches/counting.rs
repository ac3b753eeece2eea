use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qhom::counting::{penalized_infimum, OmegaSegment};
use qhom::graph::{farey_height, tree_ball, Model};
use qhom_bench::{element, farey_evaluator, tree_evaluator};

fn truncated_graphs(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph");
    for n in [8u64, 16, 32] {
        group.bench_with_input(BenchmarkId::new("farey_height", n), &n, |b, &n| b.iter(|| farey_height(black_box(n))));
    }
    let g = farey_height(32);
    let (x, y) = (g.vertex(0).clone(), g.vertex(g.len() as u32 - 1).clone());
    group.bench_function("farey_distance_32", |b| b.iter(|| g.distance(black_box(&x), black_box(&y)).unwrap()));
    group.finish();
}

fn infimum(c: &mut Criterion) {
    let g = tree_ball(2, 5).unwrap();
    let omega = OmegaSegment::parse(Model::tree(2).unwrap(), "1; a; a b").unwrap();
    let (x, y) = (g.vertex(1).clone(), g.vertex(g.len() as u32 - 1).clone());
    c.bench_function("penalized_infimum_tree_ball_5", |b| {
        b.iter(|| penalized_infimum(black_box(&x), black_box(&y), &omega, 1, &g).unwrap())
    });
}

fn quasi_homomorphism(c: &mut Criterion) {
    let mut group = c.benchmark_group("h");
    let tree = tree_evaluator();
    let farey = farey_evaluator();
    for power in [4i64, 16, 64] {
        let t = element(&tree, "a b^-1 a b", power);
        group.bench_with_input(BenchmarkId::new("tree", power), &t, |b, g| b.iter(|| tree.h(g).unwrap()));
        let f = element(&farey, "R L^2", power);
        group.bench_with_input(BenchmarkId::new("farey", power), &f, |b, g| b.iter(|| farey.h(g).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, truncated_graphs, infimum, quasi_homomorphism);
criterion_main!(benches);
