//! Shared workloads for the criterion benchmarks.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use planiso::clustering::est_cluster;
use planiso::connectivity::vertex_connectivity;
use planiso::cover::kd_cover;
use planiso::driver::{decide, list_occurrences, RunParams};
use planiso::generators::{cycle, delaunay, grid, icosahedron, octahedron, path, random_planar};
use planiso::graph::Graph;
use planiso::planar_embed;

fn params(seed: u64) -> RunParams {
    RunParams {
        // repetitions are identical work items; a few keep iterations short
        max_reps: Some(3),
        ..RunParams::with_seed(seed)
    }
}

pub fn targets() -> Vec<(&'static str, Graph)> {
    vec![
        ("delaunay-1000", delaunay(1000, 1)),
        ("planar-1000", random_planar(1000, 0.6, 2)),
        ("grid-32x32", grid(32, 32)),
    ]
}

pub fn embedding(c: &mut Criterion) {
    let mut group = c.benchmark_group("embed");
    for n in [1_000, 10_000] {
        let g = delaunay(n, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| planar_embed(black_box(g))));
    }
    group.finish();
}

pub fn clustering(c: &mut Criterion) {
    let g = delaunay(10_000, 4);
    c.bench_function("cluster/delaunay-10000", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            est_cluster(&g, 8.0, &mut ChaCha8Rng::seed_from_u64(seed))
        })
    });
    c.bench_function("cover/delaunay-10000/k4-d2", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            kd_cover(&g, 4, 2, &mut ChaCha8Rng::seed_from_u64(seed))
        })
    });
}

pub fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide");
    group.sample_size(10);
    for (name, g) in targets() {
        for (pname, h) in [("P4", path(4)), ("C5", cycle(5))] {
            group.bench_with_input(BenchmarkId::new(pname, name), &g, |b, g| {
                b.iter(|| decide(g, &h, &params(7)).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("list");
    group.sample_size(10);
    let g = random_planar(300, 0.7, 5);
    group.bench_function("C4/planar-300", |b| {
        b.iter(|| list_occurrences(&g, &cycle(4), &params(8)).unwrap())
    });
    group.finish();
}

pub fn connectivity(c: &mut Criterion) {
    let mut group = c.benchmark_group("connectivity");
    group.sample_size(10);
    for (name, g) in [("octahedron", octahedron()), ("icosahedron", icosahedron())] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &g, |b, g| {
            b.iter(|| vertex_connectivity(g, &RunParams::with_seed(9)).unwrap())
        });
    }
    group.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    embedding(c);
    clustering(c);
    matching(c);
    connectivity(c);
}
