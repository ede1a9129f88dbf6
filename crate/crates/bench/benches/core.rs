use besov_bench::{bilinear, hardy, power_space, quartic};
use besov_core::pick::{kaluza_coeffs, PowerSeriesKernel, Precision};
use besov_core::{mult_matrix, moment_sequence, op_norm, random_lower_triangular, WeightDensity};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn moments(c: &mut Criterion) {
    let mut g = c.benchmark_group("moment_sequence");
    for (name, v) in [
        ("power", WeightDensity::power(0.5).unwrap()),
        ("power_log", WeightDensity::power_log(0.5, 1.0).unwrap()),
        ("exp_cusp", WeightDensity::exp_cusp(0.0).unwrap()),
    ] {
        g.bench_function(name, |b| b.iter(|| moment_sequence(black_box(&v), 256).unwrap()));
    }
    g.finish();
}

fn kaluza(c: &mut Criterion) {
    let mut g = c.benchmark_group("kaluza");
    let k = PowerSeriesKernel::binomial(0.5, 512).unwrap();
    for (name, p) in [("double", Precision::Double), ("extended", Precision::Extended)] {
        g.bench_function(name, |b| b.iter(|| kaluza_coeffs(black_box(&k), p)));
    }
    g.finish();
}

fn sections(c: &mut Criterion) {
    let mut g = c.benchmark_group("mult_matrix");
    let h = hardy(420);
    let phi = quartic();
    for n in [100usize, 400] {
        g.bench_with_input(BenchmarkId::new("hardy", n), &n, |b, &n| b.iter(|| mult_matrix(&phi, &h, &h, n).unwrap()));
    }
    let sp = power_space(2, 1.0, 1.0, 14);
    let psi = bilinear();
    g.bench_function("ball_d2_n12", |b| b.iter(|| mult_matrix(&psi, &sp, &sp, 12).unwrap()));
    g.finish();
}

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("op_norm");
    let h = hardy(420);
    let phi = quartic();
    for n in [100usize, 400] {
        let m = mult_matrix(&phi, &h, &h, n).unwrap().entries;
        g.bench_with_input(BenchmarkId::new("banded_hardy", n), &m, |b, m| b.iter(|| op_norm(m, 0).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dense = random_lower_triangular(&mut rng, 200);
    g.bench_function("dense_lower_200", |b| b.iter(|| op_norm(&dense, 0).unwrap()));
    g.finish();
}

criterion_group!(benches, moments, kaluza, sections, norms);
criterion_main!(benches);
