use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cryptogen::leakcode::{ratio_bound_check, run_indep_experiment};
use cryptogen::protocol::{enumerate, DEFAULT_BUDGET};
use cryptogen::stego::{equivalence_audit, AuditBudget};
use cryptogen::suspicion::check_transcript_bound;
use cryptogen::ratio;
use cryptogen_bench::{embedding_instance, random_instance};

fn protocols(c: &mut Criterion) {
    let mut g = c.benchmark_group("protocol");
    for depth in [3, 5, 7] {
        let (tree, s) = random_instance(1, depth);
        g.bench_with_input(BenchmarkId::new("enumerate", depth), &depth, |b, _| {
            b.iter(|| enumerate(black_box(&tree), &s, DEFAULT_BUDGET).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("transcript_bound", depth), &depth, |b, _| {
            b.iter(|| check_transcript_bound(black_box(&tree), &s, DEFAULT_BUDGET).unwrap())
        });
    }
    g.finish();
}

fn leakage(c: &mut Criterion) {
    let mut g = c.benchmark_group("leakcode");
    g.sample_size(10);
    let (b, cap) = (ratio(1, 2), ratio(2, 3));
    for n in [50, 100] {
        g.bench_with_input(BenchmarkId::new("indep_experiment_20_trials", n), &n, |bench, &n| {
            bench.iter(|| run_indep_experiment(&b, &cap, 0.1, n, 20, 3).unwrap())
        });
    }
    g.bench_function("ratio_check_200_100", |bench| bench.iter(|| ratio_bound_check(black_box(200), 100).unwrap()));
    g.finish();
}

fn embedding(c: &mut Criterion) {
    let (tree, ch, s) = embedding_instance();
    c.bench_function("stego/audit_one_message", |b| {
        b.iter(|| equivalence_audit(&tree, &ch, &s, AuditBudget::default()).unwrap())
    });
}

criterion_group!(benches, protocols, leakage, embedding);
criterion_main!(benches);
