//! Data-parallel vs single-threaded schedules on the hot loops: parity trials,
//! the intersection cocycle, and apex resampling for a linking number.
//!
//! With `--no-default-features` only the sequential fallback is measured.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vkampen::deleted::DeletedProduct;
use vkampen::linking::{apex_independence, product_ornament};
use vkampen::obstruction::intersection_cocycle;
use vkampen::plmap::{random_generic_map, van_kampen_parity};
use vkampen::simplicial::{fkt_complex, skeleton};

#[cfg(feature = "parallel")]
fn schedules() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("1-thread", one), ("pool", all)]
}

#[cfg(feature = "parallel")]
fn run<R: Send>(pool: &rayon::ThreadPool, f: impl FnOnce() -> R + Send) -> R {
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn schedules() -> Vec<(&'static str, ())> {
    vec![("sequential", ())]
}

#[cfg(not(feature = "parallel"))]
fn run<R>(_: &(), f: impl FnOnce() -> R) -> R {
    f()
}

fn parity(c: &mut Criterion) {
    let k = skeleton(2, 6).unwrap();
    let mut g = c.benchmark_group("parity-skeleton-2-6");
    for (name, pool) in schedules() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || van_kampen_parity(black_box(&k), 4, 16, 1).unwrap()))
        });
    }
    g.finish();
}

fn cocycle(c: &mut Criterion) {
    let k = fkt_complex();
    let x = DeletedProduct::new(&k, 2).unwrap();
    let f = random_generic_map(&k, 4, 3).unwrap();
    let mut g = c.benchmark_group("cocycle-fkt");
    g.sample_size(10);
    for (name, pool) in schedules() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || intersection_cocycle(black_box(&f), &x, 2).unwrap()))
        });
    }
    g.finish();
}

fn apexes(c: &mut Criterion) {
    let orn = product_ornament(2, 2).unwrap();
    let seeds: Vec<u64> = (0..8).collect();
    let mut g = c.benchmark_group("apex-seeds-hopf");
    g.sample_size(10);
    for (name, pool) in schedules() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || apex_independence(black_box(&orn), &seeds).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, parity, cocycle, apexes);
criterion_main!(benches);
