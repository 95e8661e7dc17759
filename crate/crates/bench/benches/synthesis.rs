use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qramsynth::cqsp::{build_cqsp_case1, build_cqsp_controlled_layers, controlled_layers_threshold};
use qramsynth::qsp::{build_qsp_cascade, build_qsp_rosenthal, RosenthalLayout};
use qramsynth::sim::simulate_basis;
use qramsynth::unitary::build_unitary_csd;
use qramsynth_bench::{cqsp_spec, state, unitary};

fn qsp(c: &mut Criterion) {
    let mut g = c.benchmark_group("qsp_cascade");
    for n in [4, 6, 8, 10] {
        let v = state(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &v, |b, v| b.iter(|| build_qsp_cascade(black_box(v), 0)));
    }
    g.finish();
    let mut g = c.benchmark_group("qsp_rosenthal");
    for n in [2, 3] {
        let v = state(n, 2);
        let m = RosenthalLayout::ancilla_count(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &v, |b, v| b.iter(|| build_qsp_rosenthal(black_box(v), m)));
    }
    g.finish();
}

fn cqsp(c: &mut Criterion) {
    let mut g = c.benchmark_group("cqsp");
    for (k, n) in [(1, 3), (2, 3), (2, 5)] {
        let spec = cqsp_spec(k, n, 3);
        let id = format!("k{k}_n{n}");
        g.bench_with_input(BenchmarkId::new("case1", &id), &spec, |b, s| b.iter(|| build_cqsp_case1(black_box(s), 0)));
        let m = controlled_layers_threshold(n, k);
        g.bench_with_input(BenchmarkId::new("controlled_layers", &id), &spec, |b, s| {
            b.iter(|| build_cqsp_controlled_layers(black_box(s), m))
        });
    }
    g.finish();
}

fn unitary_csd(c: &mut Criterion) {
    let mut g = c.benchmark_group("unitary_csd");
    for n in [2, 3, 4, 5] {
        let u = unitary(n, 4);
        g.bench_with_input(BenchmarkId::from_parameter(n), &u, |b, u| b.iter(|| build_unitary_csd(black_box(u), 0)));
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    for n in [8, 12] {
        let circ = build_qsp_cascade(&state(n, 5), 0).unwrap();
        let on: Vec<usize> = (0..n).collect();
        g.bench_function(BenchmarkId::new("dense", n), |b| b.iter(|| simulate_basis(black_box(&circ), 0, &on)));
    }
    let v = state(2, 6);
    let m = RosenthalLayout::ancilla_count(2);
    let circ = build_qsp_rosenthal(&v, m).unwrap();
    g.bench_function("sparse_rosenthal_n2", |b| b.iter(|| simulate_basis(black_box(&circ), 0, &[0, 1])));
    g.finish();
}

criterion_group!(benches, qsp, cqsp, unitary_csd, simulation);
criterion_main!(benches);
