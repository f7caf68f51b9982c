//! Throughput comparison between the rayon-parallel entry points and
//! their sequential twins, across grid resolutions and sweep widths.
//!
//! The parallel and serial paths are asserted bit-identical in the test
//! suite; this suite measures what the parallelism actually buys on the
//! embarrassingly parallel workloads (the oracle's independent grid
//! columns, the sweep's independent rows).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gausscap::{
    grid_capacity, grid_capacity_serial, sweep_capacity, sweep_capacity_serial, EnergyBudget,
    FiducialChannel, NoiseSpec, Scale, SolverConfig, SweepFamily, SweepParam,
};

fn bench_grid_oracle(c: &mut Criterion) {
    let ch = FiducialChannel::from_y(1.0, 0.1, 0.2).expect("physical channel");
    let n = EnergyBudget::new(1.0).expect("valid budget");
    let mut group = c.benchmark_group("grid_oracle");
    group.sample_size(10);
    for resolution in [100_usize, 200, 400] {
        group.bench_with_input(
            BenchmarkId::new("parallel", resolution),
            &resolution,
            |b, &res| b.iter(|| grid_capacity(&ch, &n, res)),
        );
        group.bench_with_input(
            BenchmarkId::new("serial", resolution),
            &resolution,
            |b, &res| b.iter(|| grid_capacity_serial(&ch, &n, res)),
        );
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("omega_env_sweep");
    group.sample_size(10);
    for steps in [64_usize, 256, 1024] {
        let family = SweepFamily {
            param: SweepParam::OmegaEnv,
            lo: 0.01,
            hi: 1.0,
            steps,
            scale: Scale::Linear,
            tau: -1.0,
            noise: NoiseSpec::MEnv(0.1),
            omega_env: f64::NAN,
            n_bar: 1.0,
        };
        group.bench_with_input(BenchmarkId::new("parallel", steps), &family, |b, fam| {
            b.iter(|| sweep_capacity(fam, &cfg).expect("sweep"))
        });
        group.bench_with_input(BenchmarkId::new("serial", steps), &family, |b, fam| {
            b.iter(|| sweep_capacity_serial(fam, &cfg).expect("sweep"))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_grid_oracle, bench_sweep);
criterion_main!(benches);
