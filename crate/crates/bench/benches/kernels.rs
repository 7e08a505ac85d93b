use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use lh2_core::demand::{hourly_series, synthetic_schedule, DemandConfig, SyntheticOptions, AMS};
use lh2_core::flownet::{BranchControl, Controls};
use lh2_core::scenarios::{run_transport, TransportConfig, DIAMETER_8IN};
use lh2_core::sensitivity::{ishigami, saltelli_sample, sobol_indices, IndexOptions, ParameterSpace, SampleOptions};
use lh2_core::PropertySet;

fn properties(c: &mut Criterion) {
    let props = PropertySet::parahydrogen();
    let h = props.liquid_enthalpy(20.5, 1.2e5).unwrap();
    c.bench_function("state_ph", |b| b.iter(|| props.state_ph(black_box(1.2e5), black_box(h + 2000.0))));
    let rho = props.saturated_liquid_density(20.86).unwrap();
    let m = 0.5 * 96.0 * rho;
    let u = m * (props.saturated_liquid_enthalpy(20.86).unwrap() - 1.2e5 / rho) + 1.0e5;
    c.bench_function("flash_uv", |b| b.iter(|| props.flash_uv(black_box(m), black_box(u), black_box(96.0))));
}

fn transport(c: &mut Criterion) {
    let props = PropertySet::parahydrogen();
    let cfg = TransportConfig::four_km(DIAMETER_8IN);
    let controls = Controls { pump_speed: 1.0, branches: vec![BranchControl::Flow(cfg.mass_flow())] };
    c.bench_function("transport_step_50_cells", |b| {
        b.iter_batched(
            || cfg.build(props).unwrap(),
            |mut net| net.step(props, &controls, cfg.dt).unwrap(),
            criterion::BatchSize::SmallInput,
        )
    });
    let mut group = c.benchmark_group("scenarios");
    group.sample_size(10);
    group.bench_function("transport_4km_steady", |b| b.iter(|| run_transport(props, black_box(&cfg)).unwrap()));
    group.finish();
}

fn sensitivity(c: &mut Criterion) {
    use std::f64::consts::PI;
    let space = ParameterSpace::new(vec![("x1", -PI, PI), ("x2", -PI, PI), ("x3", -PI, PI)]).unwrap();
    c.bench_function("saltelli_sample_n1024_d3", |b| {
        b.iter(|| saltelli_sample(&space, black_box(1024), SampleOptions::default()).unwrap())
    });
    let rows = saltelli_sample(&space, 1024, SampleOptions::default()).unwrap();
    let y: Vec<f64> = rows.iter().map(|x| ishigami(x, 7.0, 0.1)).collect();
    let opts = IndexOptions { bootstrap_resamples: 100, ..IndexOptions::default() };
    c.bench_function("sobol_indices_n1024_boot100", |b| b.iter(|| sobol_indices(&space, "y", black_box(&y), opts).unwrap()));
}

fn demand(c: &mut Criterion) {
    let schedule = synthetic_schedule(AMS, &SyntheticOptions::default()).unwrap();
    let cfg = DemandConfig::default();
    c.bench_function("hourly_series_synthetic_day", |b| b.iter(|| hourly_series(black_box(&schedule), &cfg).unwrap()));
}

criterion_group!(benches, properties, transport, sensitivity, demand);
criterion_main!(benches);
