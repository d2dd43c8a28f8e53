use std::hint::black_box;

use allocflow_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn model(inst: &ProblemInstance) -> Model {
    Model::new(inst, DEFAULT_FLOW_CAP).unwrap()
}

fn fixtures_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("fixtures");
    for (name, inst) in [("table4_d4", fixtures::table4(4.0)), ("realworld", fixtures::realworld())] {
        let m = model(&inst);
        let o = Objective::distance(&inst);
        group.bench_function(BenchmarkId::new("branch_bound", name), |b| {
            b.iter(|| solve_branch_bound(black_box(&m), &o, None).unwrap())
        });
        group.bench_function(BenchmarkId::new("bruteforce", name), |b| {
            b.iter(|| solve_bruteforce(black_box(&m), &o, DEFAULT_ENUMERATION_CAP, 1).unwrap())
        });
        group.bench_function(BenchmarkId::new("pareto", name), |b| {
            b.iter(|| pareto_front(black_box(&m), &o, DEFAULT_ENUMERATION_CAP, 1).unwrap())
        });
        group.bench_function(BenchmarkId::new("baseline", name), |b| b.iter(|| solve_baseline(black_box(&m)).unwrap()));
    }
    group.finish();
}

fn random_bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("random");
    for n in [4usize, 8, 12, 16, 20] {
        let inst = random_instance(n, &RandomParams::default(), n as u64);
        let o = Objective::distance(&inst);
        group.bench_with_input(BenchmarkId::new("compile_and_solve", n), &inst, |b, inst| {
            b.iter(|| solve_branch_bound(&model(black_box(inst)), &o, None).unwrap())
        });
        if n <= 8 {
            let m = model(&inst);
            group.bench_with_input(BenchmarkId::new("bruteforce", n), &m, |b, m| {
                b.iter(|| solve_bruteforce(black_box(m), &o, DEFAULT_ENUMERATION_CAP, 1).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, fixtures_bench, random_bench);
criterion_main!(benches);
