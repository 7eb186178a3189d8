//! Criterion benchmarks for the spectral kernel and the information
//! measures at desk scale.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qent_core::capacity::{capacity_q, info_q, OptimizerConfig};
use qent_core::channel::{push_coupling, Channel};
use qent_core::coupling::standard_coupling;
use qent_core::infomeasure::{bs_relative_entropy, q_entropy_closed, total_information};
use qent_core::matcore::herm_eig;
use qent_core::sampling::{random_channel, random_density, random_state};
use qent_core::BlockShape;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_herm_eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("herm_eig");
    for &n in &[4usize, 8, 16, 32] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_density(&mut rng, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| herm_eig(m).unwrap())
        });
    }
    group.finish();
}

fn bench_bs_relative_entropy(c: &mut Criterion) {
    let mut group = c.benchmark_group("bs_relative_entropy");
    for &n in &[4usize, 9, 16] {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let omega = random_density(&mut rng, n);
        let phi = random_density(&mut rng, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| bs_relative_entropy(&omega, &phi).unwrap())
        });
    }
    group.finish();
}

fn bench_q_entropy(c: &mut Criterion) {
    let mut group = c.benchmark_group("q_entropy");
    let shapes = [vec![2], vec![3], vec![2, 2]];
    for dims in &shapes {
        let shape = BlockShape::new(dims.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(&mut rng, &shape);
        let label = format!("{dims:?}");
        group.bench_with_input(BenchmarkId::new("closed", &label), &s, |b, s| {
            b.iter(|| q_entropy_closed(s))
        });
        group.bench_with_input(BenchmarkId::new("direct", &label), &s, |b, s| {
            b.iter(|| total_information(&standard_coupling(s)).unwrap().value)
        });
    }
    group.finish();
}

fn bench_info_q(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ch = random_channel(&mut rng, 2, 2, 3);
    let s = random_state(&mut rng, &BlockShape::simple(2));
    c.bench_function("info_q/qubit_3_kraus", |b| {
        b.iter(|| info_q(&s, &ch).unwrap())
    });
    c.bench_function("push_coupling/qubit_3_kraus", |b| {
        let cpl = standard_coupling(&s);
        b.iter(|| push_coupling(&cpl, &ch).unwrap())
    });
}

fn bench_capacity_q(c: &mut Criterion) {
    let ch = Channel::identity(&BlockShape::simple(2));
    let cfg = OptimizerConfig {
        restarts: 4,
        ..OptimizerConfig::with_seed(5)
    };
    let mut group = c.benchmark_group("capacity_q");
    group.sample_size(10);
    group.bench_function("noiseless_qubit_4_restarts", |b| {
        b.iter(|| capacity_q(&ch, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_herm_eig,
    bench_bs_relative_entropy,
    bench_q_entropy,
    bench_info_q,
    bench_capacity_q
);
criterion_main!(benches);
