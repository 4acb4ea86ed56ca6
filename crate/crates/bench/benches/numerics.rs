use std::hint::black_box;

use chirality_core::bath::compute_kernels;
use chirality_core::dynamics::{build_schedule, kernel_grid, propagate_with};
use chirality_core::oracle::{self, InitialState};
use chirality_core::{BathConfig, ChiralQubitParams, DensityMatrix2, PropagationOptions, SpectralDensity};
use criterion::{criterion_group, criterion_main, Criterion};

fn fig2_like(temperature: f64) -> (BathConfig, ChiralQubitParams) {
    let spectral = SpectralDensity::Lorentzian { alpha: 1.0, lambda: 1.0, omega0: 120.0 };
    let params = ChiralQubitParams::from_ratios(100.0, 0.4, 119.9).unwrap();
    (BathConfig::new(spectral, temperature), params)
}

fn output_times() -> Vec<f64> {
    (0..=200).map(|k| 0.01 * k as f64).collect()
}

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernels");
    g.sample_size(10);
    let grid = kernel_grid(&output_times(), 2.0, 1e-2);
    for temperature in [0.0, 20.0] {
        let (bath, params) = fig2_like(temperature);
        g.bench_function(format!("lorentzian T={temperature}, {} times", grid.len()), |b| {
            b.iter(|| compute_kernels(black_box(&bath), &params, &grid).unwrap())
        });
    }
    g.finish();
}

fn propagation(c: &mut Criterion) {
    let (bath, params) = fig2_like(20.0);
    let times = output_times();
    let opts = PropagationOptions::default();
    let (schedule, _) = build_schedule(&bath, &params, &times, 2.0, &opts).unwrap();
    let mut g = c.benchmark_group("propagate");
    g.bench_function("secular, t in [0, 2]", |b| {
        b.iter(|| propagate_with(black_box(&DensityMatrix2::up()), &schedule, params.omega_s, &times, &opts).unwrap())
    });
    let full = PropagationOptions { include_nonsecular: true, ..opts };
    g.bench_function("non-secular, t in [0, 2]", |b| {
        b.iter(|| propagate_with(black_box(&DensityMatrix2::up()), &schedule, params.omega_s, &times, &full).unwrap())
    });
    g.finish();
}

fn exact_oracle(c: &mut Criterion) {
    let spectral = SpectralDensity::Lorentzian { alpha: 0.1f64.sqrt(), lambda: 1.0, omega0: 120.0 };
    let params = ChiralQubitParams::from_ratios(100.0, 0.4, 119.9).unwrap();
    let times: Vec<f64> = (0..=100).map(|k| 0.005 * k as f64).collect();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    for n in [2, 4] {
        let modes = oracle::discretize(&spectral, n, oracle::default_window(&spectral), 2).unwrap();
        g.bench_function(format!("{n} modes, n_max 2"), |b| {
            b.iter(|| oracle::exact_evolve(&params, black_box(&modes), &times, InitialState::DressedUp).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernels, propagation, exact_oracle);
criterion_main!(benches);
