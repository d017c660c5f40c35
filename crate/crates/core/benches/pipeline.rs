use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use intertopo::geometry::{distance_matrix, PointCloud};
use intertopo::homology::persistent_barcode;
use intertopo::spectral::{auto_grid, gap_curve, CurveGrid, InteractionSystem, ZeroTolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::new((0..n).map(|i| {
        let label = ["C", "B", "H"][i % 3];
        (label, (0..3).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<f64>>())
    }))
    .unwrap()
}

fn system(n: usize) -> InteractionSystem {
    let c = cloud(n, 7);
    let groups = vec![(0..n).filter(|i| i % 3 != 2).collect(), (0..n).filter(|i| i % 3 != 1).collect()];
    InteractionSystem::new(distance_matrix(&c), groups).unwrap()
}

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("parallel", rayon::ThreadPoolBuilder::new().build().unwrap()),
        ("sequential", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
    ]
}

fn bench_distances(c: &mut Criterion) {
    let points = cloud(600, 1);
    let mut group = c.benchmark_group("distance_matrix");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 600), |b| pool.install(|| b.iter(|| distance_matrix(black_box(&points)))));
    }
    group.finish();
}

fn bench_gap_curve(c: &mut Criterion) {
    let sys = system(30);
    let crit = sys.critical_values();
    let grid: Vec<f64> = auto_grid(&crit).into_iter().filter(|&t| t <= 1.5).collect();
    let grid = CurveGrid::Snapshot(grid);
    let mut group = c.benchmark_group("gap_curve");
    group.sample_size(10);
    for p in 0..=1 {
        for (name, pool) in pools() {
            group.bench_function(BenchmarkId::new(name, format!("p{p}")), |b| {
                pool.install(|| b.iter(|| gap_curve(black_box(&sys), p, &grid, ZeroTolerance::default()).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_barcode(c: &mut Criterion) {
    let sys = system(24);
    let mut group = c.benchmark_group("barcode");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| pool.install(|| b.iter(|| persistent_barcode(&sys.basis(2, 1.2)))));
    }
    group.finish();
}

criterion_group!(benches, bench_distances, bench_gap_curve, bench_barcode);
criterion_main!(benches);
