use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ddghz_core::metrics::tangle::ghz;
use ddghz_core::metrics::{g1, metrics_report, mtangle_pure, mway_ep_nonunitary};
use ddghz_core::oracle::{random_crs, substream};
use ddghz_core::search::search_sequential;
use ddghz_core::spin::{compose_register, khz_to_rad, unit_propagators, G1Series, DEFAULT_LARMOR_KHZ};
use ddghz_core::{Register, Scheme, SearchTolerances, SequenceBlock, SequencePlan, SequenceUnit};

fn bundled() -> Register {
    Register::bundled(khz_to_rad(DEFAULT_LARMOR_KHZ)).unwrap()
}

fn propagators(c: &mut Criterion) {
    let reg = bundled();
    let unit = SequenceUnit::cpmg();
    let spin = &reg.spins()[4];
    c.bench_function("unit_propagators_cpmg", |b| {
        b.iter(|| unit_propagators(spin, &reg, &unit, black_box(17.2e-6)).unwrap())
    });
    let series = G1Series::new(&unit_propagators(spin, &reg, &unit, 17.2e-6).unwrap());
    c.bench_function("g1_series_1000_n", |b| b.iter(|| (1..=1000u64).map(|n| series.g1(black_box(n))).sum::<f64>()));
    let plan = SequencePlan::new(vec![
        SequenceBlock::new(unit.clone(), 17.18e-6, 46).unwrap(),
        SequenceBlock::new(unit.clone(), 38.26e-6, 20).unwrap(),
    ]);
    c.bench_function("compose_register_27_spins", |b| b.iter(|| compose_register(&reg, black_box(&plan)).unwrap()));
    let rot = compose_register(&reg, &plan).unwrap();
    c.bench_function("g1_27_spins", |b| b.iter(|| rot.iter().map(g1).sum::<f64>()));
    c.bench_function("metrics_report_27_spins", |b| {
        b.iter(|| metrics_report(&reg, black_box(&plan), &[5, 18]).unwrap())
    });
}

fn tangles(c: &mut Criterion) {
    let g6 = ghz(6);
    c.bench_function("mtangle_ghz6", |b| b.iter(|| mtangle_pure(black_box(&g6), 6, false).unwrap()));
    let g7 = ghz(7);
    c.bench_function("mtangle_ghz7_projector", |b| b.iter(|| mtangle_pure(black_box(&g7), 7, true).unwrap()));
    let mut rng = substream(1, 0);
    let t = random_crs(&mut rng, 4);
    let u = random_crs(&mut rng, 22);
    c.bench_function("ep_nonunitary_22_spectators", |b| b.iter(|| mway_ep_nonunitary(black_box(&t), &u).unwrap()));
}

fn search(c: &mut Criterion) {
    let full = bundled();
    let idx: Vec<usize> = ["C5", "C12", "C18", "C19"].iter().map(|l| full.index_of(l).unwrap()).collect();
    let reg = full.subset(&idx).unwrap();
    let mut tol = SearchTolerances::table(Scheme::Sequential, 3).unwrap();
    tol.k_max = 3;
    let unit = SequenceUnit::cpmg();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("sequential_ghz3_toy_register", |b| b.iter(|| search_sequential(&reg, &unit, &tol).unwrap()));
    g.finish();
}

criterion_group!(benches, propagators, tangles, search);
criterion_main!(benches);
