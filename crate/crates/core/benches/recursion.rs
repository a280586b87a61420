use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wpvol::bracket::BracketEngine;
use wpvol::par::Execution;
use wpvol::volume::volume_polynomial;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

// cold engines, so every iteration recomputes the whole range
fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("bracket_range");
    group.sample_size(10);
    for w in [6u32, 8] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, w), &w, |b, &w| {
                b.iter(|| BracketEngine::with_execution(exec).bracket_range(w).len())
            });
        }
    }
    group.finish();
}

fn volumes(c: &mut Criterion) {
    let mut group = c.benchmark_group("volume_polynomial");
    group.sample_size(10);
    for (g, n) in [(4u32, 1usize), (3, 4)] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("{g},{n}")), &(g, n), |b, &(g, n)| {
                b.iter(|| {
                    let e = BracketEngine::with_execution(exec);
                    volume_polynomial(&e, g, n).unwrap().degree()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep, volumes);
criterion_main!(benches);
