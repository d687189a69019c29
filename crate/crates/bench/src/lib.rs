//! Criterion benchmarks for the assembly and solve kernels.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use ggkdv::gram::{observability_report, ObservationMode, ObservationWindow};
use ggkdv::hum::{assemble_lambda_on, solve_with, ControlMode};
use ggkdv::stabilization::{closed_loop_simulate, feedback_gains_on};
use ggkdv::{ModalState, PhysicalParams, Spectrum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn benchmarks(c: &mut Criterion) {
    observability(c);
    control(c);
    stabilization(c);
}

fn observability(c: &mut Criterion) {
    let mut group = c.benchmark_group("observability");
    let window = ObservationWindow::of_length(1.0).unwrap();
    for n in [4, 8, 16, 32] {
        let spec = Spectrum::new(PhysicalParams::generic(), n);
        group.bench_with_input(BenchmarkId::new("both", n), &spec, |b, spec| {
            b.iter(|| {
                observability_report(
                    spec,
                    0.0,
                    window,
                    ObservationMode::Both,
                    &Default::default(),
                )
                .unwrap()
            })
        });
    }
    let spec = Spectrum::new(PhysicalParams::resonant(), 8);
    let long = ObservationWindow::of_length(20.0).unwrap();
    group.bench_function("u_only_divided/8", |b| {
        b.iter(|| {
            observability_report(
                &spec,
                0.0,
                long,
                ObservationMode::UOnly,
                &Default::default(),
            )
            .unwrap()
        })
    });
    group.finish();
}

fn control(c: &mut Criterion) {
    let mut group = c.benchmark_group("control");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [4, 6, 10] {
        let spec = Spectrum::new(PhysicalParams::generic(), n);
        let initial = ModalState::random_unit(&spec, &mut rng);
        let target = ModalState::zeros(n);
        group.bench_with_input(BenchmarkId::new("assemble", n), &spec, |b, spec| {
            b.iter(|| assemble_lambda_on(spec, 0.0, 1.0, ControlMode::Both).unwrap())
        });
        let system = assemble_lambda_on(&spec, 0.0, 1.0, ControlMode::Both).unwrap();
        group.bench_with_input(BenchmarkId::new("solve", n), &system, |b, system| {
            b.iter(|| solve_with(system, black_box(&initial), &target).unwrap())
        });
    }
    group.finish();
}

fn stabilization(c: &mut Criterion) {
    let mut group = c.benchmark_group("stabilization");
    let spec = Spectrum::new(PhysicalParams::generic(), 6);
    group.bench_function("gains/6", |b| {
        b.iter(|| feedback_gains_on(&spec, 0.0, black_box(0.5), 2.0).unwrap())
    });
    let gains = feedback_gains_on(&spec, 0.0, 0.5, 2.0).unwrap();
    let state = ModalState::random_unit(&spec, &mut ChaCha8Rng::seed_from_u64(2));
    group.bench_function("simulate/6", |b| {
        b.iter(|| closed_loop_simulate(&spec, &gains, &state, 20.0).unwrap())
    });
    group.finish();
}
