use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nidkit::complexity::{k_time_with, ConditionalTable};
use nidkit::exec::Execution;
use nidkit::ncd::{matrix_with, synthetic_corpus, Builtin, SyntheticSpec};
use nidkit::prefix_machine::{enumerate_with, literal_bound, StepBound};
use nidkit::BitString;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn enumeration(c: &mut Criterion) {
    let bound = StepBound::new(8, 1, 16);
    let cond: BitString = "0110".parse().unwrap();
    let mut g = c.benchmark_group("enumerate_16");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| enumerate_with(black_box(16), &cond, &bound, exec).len())
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let bound = StepBound::new(8, 1, 16);
    let mut g = c.benchmark_group("k_time");
    for x in ["0110100110", "100111010001"] {
        let x: BitString = x.parse().unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, x.len()), &x, |b, x| {
                b.iter(|| k_time_with(x, &BitString::empty(), &bound, literal_bound(x.len()), exec))
            });
        }
    }
    g.finish();

    let mut g = c.benchmark_group("conditional_table");
    g.sample_size(20);
    let y: BitString = "1011".parse().unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| ConditionalTable::build_with(&y, &bound, 17, 8, exec).len())
        });
    }
    g.finish();
}

fn ncd_matrix(c: &mut Criterion) {
    let corpus = synthetic_corpus(&SyntheticSpec::default());
    let mut g = c.benchmark_group("ncd_matrix_12x4k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| matrix_with(&corpus.items, &Builtin, exec).unwrap().len())
        });
    }
    g.finish();
}

criterion_group!(benches, enumeration, search, ncd_matrix);
criterion_main!(benches);
