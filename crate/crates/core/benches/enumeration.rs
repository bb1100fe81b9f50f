use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tropteich::enumerate::{contraction_poset_with, enumerate_stable_graphs_with};
use tropteich::moduli::{build_mg_raw, build_tg_chart_raw, random_seeds, verify_quotient_with};
use tropteich::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for genus in [3usize, 4] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, genus), &genus, |b, &g| {
                b.iter(|| enumerate_stable_graphs_with(g, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn poset_and_mg(c: &mut Criterion) {
    let mut group = c.benchmark_group("mg");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(format!("poset-{name}"), 3), |b| {
            b.iter(|| contraction_poset_with(3, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new(format!("diagram-{name}"), 3), |b| {
            b.iter(|| build_mg_raw(3, exec).unwrap())
        });
    }
    group.finish();
}

fn markings(c: &mut Criterion) {
    let mut group = c.benchmark_group("markings");
    group.sample_size(10);
    let seeds = random_seeds(3, 4, 7).unwrap();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(format!("quotient-{name}"), 2), |b| {
            b.iter(|| verify_quotient_with(2, 10, 7, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new(format!("chart-{name}"), 3), |b| {
            b.iter(|| build_tg_chart_raw(&seeds, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, poset_and_mg, markings);
criterion_main!(benches);
