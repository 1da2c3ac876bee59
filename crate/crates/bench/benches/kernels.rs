use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fadingdpc::bounds::{all_bounds, e1_scaled};
use fadingdpc::dpc_sim::{frame_rng, simulate_frame};
use fadingdpc::McSettings;
use fadingdpc::SeedSpec;
use fadingdpc_bench::{construction_a_4, rayleigh_case, scalar_transceiver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quantizers(c: &mut Criterion) {
    let lattice = construction_a_4();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points: Vec<Vec<f64>> = (0..256).map(|_| (0..4).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    c.bench_function("construction_a_quantize_256", |b| {
        b.iter(|| {
            for p in &points {
                black_box(lattice.quantize(black_box(p)));
            }
        })
    });
    c.bench_function("construction_a_mod_256", |b| {
        b.iter(|| {
            for p in &points {
                black_box(lattice.mod_lattice(black_box(p)));
            }
        })
    });
}

fn bounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_bounds_10k");
    group.sample_size(10);
    for (tx, rx) in [(1, 1), (2, 4), (4, 4)] {
        let (power, spec) = rayleigh_case(tx, rx);
        let mc = McSettings::new(42, 10_000);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{tx}x{rx}")), &(power, spec), |b, (p, s)| {
            b.iter(|| all_bounds(p, s, &mc).unwrap())
        });
    }
    group.finish();
}

fn exponential_integral(c: &mut Criterion) {
    c.bench_function("e1_scaled_grid", |b| {
        b.iter(|| {
            for k in -4..=4 {
                black_box(e1_scaled(10f64.powi(k)).unwrap());
            }
        })
    });
}

fn frames(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_frame");
    for n_sym in [16, 256] {
        let dpc = scalar_transceiver(n_sym, 2);
        let seed = SeedSpec::new(7);
        group.bench_with_input(BenchmarkId::from_parameter(n_sym), &dpc, |b, dpc| {
            let mut k = 0;
            b.iter(|| {
                k += 1;
                simulate_frame(dpc, &mut frame_rng(&seed, k)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, quantizers, bounds, exponential_integral, frames);
criterion_main!(benches);
