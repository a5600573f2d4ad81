use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stochcuts::benders::{recourse_lower_bounds, solve_all_scenarios};
use stochcuts::drivers::{run, Algorithm, RunConfig};
use stochcuts::instances::{generate_sslp, random_instance, GeneratorConfig};
use stochcuts::mip::enumerate_binary_with;
use stochcuts::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn subproblem_sweep(c: &mut Criterion) {
    let inst = generate_sslp(&GeneratorConfig::sslp(10, 20, 50, 7)).unwrap();
    let x: Vec<f64> = (0..inst.n1()).map(|j| (j % 2) as f64).collect();
    let mut g = c.benchmark_group("subproblem_sweep");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("scenarios", name), |b| {
            b.iter(|| solve_all_scenarios(black_box(&inst), black_box(&x), exec).unwrap())
        });
        g.bench_function(BenchmarkId::new("recourse_bounds", name), |b| {
            b.iter(|| recourse_lower_bounds(black_box(&inst), exec).unwrap())
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let model = random_instance(3, 8, 4, 3, 4, 11).build_extensive();
    let mut g = c.benchmark_group("binary_enumeration");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| enumerate_binary_with(black_box(&model), 1 << 12, exec).unwrap())
        });
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let inst = generate_sslp(&GeneratorConfig::sslp(5, 10, 8, 42)).unwrap();
    let mut g = c.benchmark_group("bdd_run");
    g.sample_size(10).measurement_time(Duration::from_secs(20));
    for (name, exec) in MODES {
        let mut cfg = RunConfig::new(Algorithm::Bdd);
        cfg.execution = exec;
        g.bench_function(name, |b| b.iter(|| run(black_box(&inst), &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, subproblem_sweep, enumeration, decomposition);
criterion_main!(benches);
