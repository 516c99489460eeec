use std::hint::black_box;

use biball::par::is_parallel;
use biball::solver::{solve_many, solve_many_sequential, Problem, ProblemSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn grid(n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let r = 0.9 * (i as f64 + 0.5) / count as f64;
            let mut x = vec![0.0; n];
            x[i % n] = r;
            x[(i + 1) % n] = 0.1 * r;
            x
        })
        .collect()
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("solve_many (parallel feature: {})", is_parallel()));
    group.sample_size(10);
    for n in [2, 3, 5] {
        let p = Problem::new(ProblemSpec::random(n, 2, 11)).unwrap();
        let pts = grid(n, 32);
        group.bench_with_input(BenchmarkId::new("parallel", n), &pts, |b, pts| {
            b.iter(|| solve_many(black_box(&p), black_box(pts)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &pts, |b, pts| {
            b.iter(|| solve_many_sequential(black_box(&p), black_box(pts)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
