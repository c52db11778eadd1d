use blockmean::{estimate_block_huber, estimate_multivariate, estimate_ustat, EstimatorConfig};
use blockmean_bench::{gaussian_rows, t3_sample};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_block_huber(c: &mut Criterion) {
    let mut group = c.benchmark_group("block_huber");
    for &size in &[1_000usize, 10_000, 100_000] {
        let sample = t3_sample(size, 1);
        let cfg = EstimatorConfig::new(size / 50, 1.5).with_seed(2);
        group.bench_with_input(BenchmarkId::from_parameter(size), &sample, |b, s| {
            b.iter(|| estimate_block_huber(black_box(s), &cfg).unwrap().estimate)
        });
    }
    group.finish();
}

fn bench_ustat(c: &mut Criterion) {
    let mut group = c.benchmark_group("ustat");
    let sample = t3_sample(2_000, 3);
    for &draws in &[200usize, 2_000] {
        group.bench_with_input(BenchmarkId::new("incomplete", draws), &draws, |b, &d| {
            b.iter(|| {
                estimate_ustat(
                    black_box(&sample),
                    20,
                    blockmean::UStatMode::Incomplete { draws: d },
                    1.5,
                    blockmean::ScoreFunction::huber(),
                    7,
                )
                .unwrap()
                .estimate
            })
        });
    }
    group.finish();
}

fn bench_slab_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("slab_intersection");
    group.sample_size(20);
    for &dim in &[2usize, 5, 10] {
        let rows = gaussian_rows(5_000, dim, 4);
        let cfg = EstimatorConfig::new(25, 1.0).with_seed(5);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &rows, |b, r| {
            b.iter(|| {
                estimate_multivariate(black_box(r), 2 * dim, &cfg, 1e-4)
                    .unwrap()
                    .eps_star
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_block_huber, bench_ustat, bench_slab_solver);
criterion_main!(benches);
