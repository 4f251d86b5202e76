//! Throughput of the hot paths: one Lindblad right-hand side, a bath-contact
//! stroke, and a complete short cycle.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use otto_core::{
    initial_state, run_cycle, stroke_heating, EngineParams, FieldProfile, LindbladGenerator,
    MeasurementPolicy, StepPolicy, StrokeTimes,
};

fn bench_rhs(c: &mut Criterion) {
    let params = EngineParams::default();
    let gen = LindbladGenerator::new(&params, FieldProfile::Fixed(params.b_high), true);
    let rho = initial_state(&params).unwrap();
    c.bench_function("lindblad_rhs", |b| {
        b.iter(|| gen.rhs(black_box(0.0), black_box(rho.matrix())))
    });
}

fn bench_heating(c: &mut Criterion) {
    let params = EngineParams::default();
    let step = StepPolicy::default();
    let start = initial_state(&params).unwrap();
    c.bench_function("heating_stroke_1000_steps", |b| {
        b.iter(|| stroke_heating(black_box(&start), &params, 1.0, &step).unwrap())
    });
}

fn bench_cycle(c: &mut Criterion) {
    let params = EngineParams::default();
    let step = StepPolicy::default();
    let start = initial_state(&params).unwrap();
    let times = StrokeTimes {
        t_heat: 2.0,
        tau: 1.0,
    };
    c.bench_function("short_full_cycle", |b| {
        b.iter(|| {
            run_cycle(
                black_box(&start),
                &params,
                &times,
                MeasurementPolicy::PostSelectGround,
                &step,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_rhs, bench_heating, bench_cycle);
criterion_main!(benches);
