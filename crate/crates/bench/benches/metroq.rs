use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use metroq::random::{random_channel, random_density_matrix, random_matrix, rng_from_seed};
use metroq::*;

fn linalg(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    let mut group = c.benchmark_group("vec_identity");
    for d in [2usize, 4, 8] {
        let (a, b, m) = (
            random_matrix(&mut rng, d),
            random_matrix(&mut rng, d),
            random_matrix(&mut rng, d),
        );
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |bench, _| {
            bench.iter(|| vec_identity_residual(black_box(&a), black_box(&b), black_box(&m)).unwrap())
        });
    }
    group.finish();

    let rho = random_density_matrix(&mut rng, 64);
    let ch = random_channel(&mut rng, 2, 3);
    c.bench_function("apply_channel/6 qubits", |bench| {
        bench.iter(|| apply_channel(black_box(&rho), &ch, &[2; 6], 3).unwrap())
    });
}

fn conversion(c: &mut Criterion) {
    let h = Generator::qubit();
    let mut group = c.benchmark_group("convert_general_n");
    for n in [4usize, 8, 10] {
        let phis: Vec<f64> = (0..n).map(|j| 0.1 + 0.37 * j as f64).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &phis, |bench, phis| {
            bench.iter(|| convert_general_n(&h, black_box(phis), 0.4).unwrap())
        });
    }
    group.finish();

    c.bench_function("noon_certificate/12", |bench| {
        bench.iter(|| noon_equivalence_certificate(black_box(12)).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let spec = StrategySpec::simple(StrategyKind::EntangledParallel, 1).unwrap();
    let cfg = ExperimentConfig::new(spec, vec![1, 2, 4, 8], 4000, 50, 7);
    let mut group = c.benchmark_group("scaling");
    group.sample_size(10);
    group.bench_function("entangled/50 rounds", |bench| {
        bench.iter(|| scaling_experiment(black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, linalg, conversion, monte_carlo);
criterion_main!(benches);
