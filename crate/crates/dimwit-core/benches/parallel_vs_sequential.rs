//! Rayon-parallel vs sequential comparison for the three data-parallel
//! hot paths: strategy enumeration, see-saw restarts and delay scans.
//!
//! Build with `--no-default-features` to time the sequential-only build of
//! the parallel entry points as well.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dimwit_core::classical::{classical_bound, classical_bound_seq};
use dimwit_core::photonic::{
    scan_delay, scan_delay_seq, tau_grid, Scenario, ScenarioKind, DEFAULT_DL_FS,
};
use dimwit_core::seesaw::{seesaw_bound, seesaw_bound_seq, SeesawConfig};
use dimwit_core::witness::i4_spec;

fn bench_classical(c: &mut Criterion) {
    let spec = i4_spec();
    let mut group = c.benchmark_group("classical_bound_i4");
    for d in [3usize, 4] {
        group.bench_with_input(BenchmarkId::new("parallel", d), &d, |b, &d| {
            b.iter(|| classical_bound(&spec, d).unwrap().value)
        });
        group.bench_with_input(BenchmarkId::new("sequential", d), &d, |b, &d| {
            b.iter(|| classical_bound_seq(&spec, d).unwrap().value)
        });
    }
    group.finish();
}

fn bench_seesaw(c: &mut Criterion) {
    let spec = i4_spec();
    let config = SeesawConfig {
        restarts: 16,
        seed: 7,
        ..Default::default()
    };
    let mut group = c.benchmark_group("seesaw_bound_i4_d3");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| seesaw_bound(&spec, 3, &config).unwrap().value)
    });
    group.bench_function("sequential", |b| {
        b.iter(|| seesaw_bound_seq(&spec, 3, &config).unwrap().value)
    });
    group.finish();
}

fn bench_scan(c: &mut Criterion) {
    let scenario = Scenario::preset(ScenarioKind::Qutrit);
    let grid = tau_grid(0.0, 2.0 * DEFAULT_DL_FS, 101);
    let mut group = c.benchmark_group("scan_delay_qutrit_101");
    group.bench_function("parallel", |b| {
        b.iter(|| scan_delay(&scenario, DEFAULT_DL_FS, &grid).unwrap().len())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            scan_delay_seq(&scenario, DEFAULT_DL_FS, &grid)
                .unwrap()
                .len()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_classical, bench_seesaw, bench_scan);
criterion_main!(benches);
