use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mkdv_series::initial::random_fl;
use mkdv_series::multilinear::{apply_tree_operator, kernel_norm_scan, Kernel, Pair};
use mkdv_series::series::solve_series;
use mkdv_series::tree::enumerate_trees;
use mkdv_series::{CoeffSeq, SeriesConfig};

// With the `parallel` feature each workload runs twice: once on the global
// pool and once inside a single-thread pool, which is the sequential baseline.
// Without the feature only the sequential path exists.
#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, Option<rayon::ThreadPool>)> {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("par", None), ("seq", Some(single))]
}

#[cfg(not(feature = "parallel"))]
fn modes() -> Vec<(&'static str, Option<()>)> {
    vec![("seq", None)]
}

#[cfg(feature = "parallel")]
fn run<R: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run<R>(_: &Option<()>, f: impl FnOnce() -> R) -> R {
    f()
}

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_series");
    group.sample_size(10);
    let a0 = random_fl(8, 0.5, 2.0, 1.0, 1).unwrap();
    let cfg = SeriesConfig::new(8, 3, vec![0.01, 0.02, 0.05]);
    for (label, pool) in modes() {
        group.bench_function(BenchmarkId::new(label, "N8_K3"), |b| {
            b.iter(|| run(&pool, || solve_series(black_box(&a0), &cfg).unwrap()))
        });
    }
    group.finish();
}

fn kernel_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_norm_scan");
    group.sample_size(10);
    for (label, pool) in modes() {
        group.bench_function(BenchmarkId::new(label, "n64_M256"), |b| {
            b.iter(|| run(&pool, || kernel_norm_scan(black_box(64), 0.5, 2.0, Pair::P12, 256, Kernel::Full)))
        });
    }
    group.finish();
}

fn tree_operator(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_tree_operator");
    group.sample_size(10);
    let tree = enumerate_trees(2).pop().unwrap();
    let data: Vec<CoeffSeq> = (0..tree.leaf_count()).map(|l| random_fl(4, 0.5, 2.0, 1.0, l as u64).unwrap()).collect();
    for (label, pool) in modes() {
        group.bench_function(BenchmarkId::new(label, format!("{tree}_N4")), |b| {
            b.iter(|| run(&pool, || apply_tree_operator(&tree, black_box(&data), 0.1, 4, true).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, series, kernel_scan, tree_operator);
criterion_main!(benches);
