use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use frustra_core::spin::random_directions;
use frustra_core::*;

fn bench_build_c60(c: &mut Criterion) {
    c.bench_function("build_c60", |b| b.iter(|| black_box(build_c60().unwrap())));
}

fn bench_eigensolve(c: &mut Criterion) {
    let g = build_c60().unwrap();
    let model = CouplingModel::new(1.0, 1.0).unwrap();
    let m = neighbor_matrix(&g, &model);
    c.bench_function("jacobi_eigensolve_60x60", |b| {
        b.iter(|| black_box(solve_symmetric(black_box(&m)).unwrap()))
    });
}

fn bench_ground_state(c: &mut Criterion) {
    let g = build_c60().unwrap();
    let model = CouplingModel::new(1.0, 1.0).unwrap();
    c.bench_function("ground_state_pipeline", |b| {
        b.iter(|| black_box(ground_state(black_box(&g), &model).unwrap()))
    });
}

fn bench_rk4(c: &mut Criterion) {
    let g = build_c60().unwrap();
    let model = CouplingModel::new(1.0, 1.0).unwrap();
    let init = random_directions(60, 1);
    let opts = IntegrationOptions { sample_every: 10_000, ..Default::default() };
    c.bench_function("rk4_1000_steps", |b| {
        b.iter(|| {
            black_box(
                integrate(black_box(&g), &model, &init, 1.0, 1e-3, opts).unwrap(),
            )
        })
    });
}

fn bench_optimizer_restart(c: &mut Criterion) {
    let g = build_c60().unwrap();
    let model = CouplingModel::new(1.0, 1.0).unwrap();
    let cfg = OptimizerConfig { restarts: 1, seed: 3, ..Default::default() };
    c.bench_function("optimizer_single_restart", |b| {
        b.iter(|| black_box(minimize(black_box(&g), &model, &cfg).unwrap()))
    });
}

fn config() -> Criterion {
    Criterion::default()
        .sample_size(20)
        .measurement_time(Duration::from_secs(3))
        .warm_up_time(Duration::from_millis(500))
}

criterion_group! {
    name = benches;
    config = config();
    targets = bench_build_c60, bench_eigensolve, bench_ground_state, bench_rk4,
              bench_optimizer_restart
}
criterion_main!(benches);
