use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use resex_core::evolution::{propagate_lab, PropagationConfig};
use resex_core::models::{chain_rwa_hamiltonian, ChainParams, DqdParams, ResonanceMap, RwaLimits};
use resex_core::noise::{mc_infidelity, NoiseSpec};
use resex_core::operator::{expm_hermitian, pauli_decompose};
use resex_core::scheduling::{driven_y_optimum, schedule_zx, Evaluator, OptimizeOptions};

fn driven_chain(n: usize) -> ChainParams {
    let mut c = ChainParams::graded(n, 20e9, 0.2e9, 1e6).unwrap();
    for i in (1..n).step_by(2) {
        c.by1[i] = 1e7;
    }
    c
}

fn decompose(c: &mut Criterion) {
    let p = driven_chain(5);
    let map = ResonanceMap::classify(&p, &RwaLimits::default(), false).unwrap();
    let u = expm_hermitian(&chain_rwa_hamiltonian(&p, &map).unwrap(), 3e-7).unwrap();
    c.bench_function("pauli_decompose 5 qubits", |b| {
        b.iter(|| pauli_decompose(black_box(&u), 1e-12))
    });
}

fn y_optimum(c: &mut Criterion) {
    let p = driven_chain(5);
    let t = 2.0 * std::f64::consts::PI / 1e7;
    let opts = OptimizeOptions::default();
    c.bench_function("driven_y_optimum N=5", |b| {
        b.iter(|| driven_y_optimum(black_box(&p), (0.5 * t, 1.5 * t), &opts).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let dev = DqdParams {
        by2_r: 2e6,
        ..DqdParams::resonant(20e9, 20.2e9, 0.2e6)
    };
    let model = dev.lab_model().unwrap();
    let cfg = PropagationConfig {
        dt: 1e-12,
        ..PropagationConfig::default()
    };
    c.bench_function("lab oracle 2000 steps", |b| {
        b.iter(|| propagate_lab(black_box(&model), 2e-9, &cfg).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let s = schedule_zx(1e6, 0, 0).unwrap();
    let target = s.target.operator().unwrap();
    let noise = NoiseSpec {
        samples: 200,
        ..NoiseSpec::default()
    };
    c.bench_function("mc_infidelity zx 200 samples", |b| {
        b.iter(|| mc_infidelity(black_box(&s), &target, &noise, &Evaluator::Analytic).unwrap())
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(20);
    targets = decompose, y_optimum, oracle, monte_carlo
}
criterion_main!(kernels);
