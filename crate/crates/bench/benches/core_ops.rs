use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gefair::{
    decompose, entropy_index, hedge_solve, BenefitParams, EntropyOrder, SolverConfig,
};
use gefair_bench::{random_benefits, random_partition, random_space};

fn bench_entropy_index(c: &mut Criterion) {
    let mut group = c.benchmark_group("entropy_index");
    for &n in &[1_000usize, 100_000] {
        let b = random_benefits(n, 1);
        for alpha in [0.0, 1.0, 2.0] {
            let order = EntropyOrder::new(alpha).unwrap();
            group.bench_with_input(
                BenchmarkId::new(format!("alpha_{alpha}"), n),
                &b,
                |bencher, b| bencher.iter(|| entropy_index(black_box(b), order).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_decompose(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    let n = 100_000;
    let b = random_benefits(n, 2);
    let partition = random_partition(n, 5, 3);
    let order = EntropyOrder::new(1.0).unwrap();
    group.bench_function("n_100k_g5_theil", |bencher| {
        bencher.iter(|| decompose(black_box(&b), black_box(&partition), order).unwrap())
    });
    group.finish();
}

fn bench_space_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("threshold_grid");
    for &n in &[2_000usize, 20_000] {
        group.bench_with_input(BenchmarkId::new("build", n), &n, |bencher, &n| {
            let (scores, labels) = gefair_bench::random_scored_sample(n, 4);
            bencher.iter(|| {
                gefair::HypothesisSpace::from_scores(black_box(&scores), black_box(&labels))
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_hedge_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("hedge_solve");
    group.sample_size(10);
    let space = random_space(2_000, 5);
    let params = BenefitParams::new(5.0, 8.0).unwrap();
    let config = SolverConfig {
        t_cap: 10_000,
        ..SolverConfig::new(0.05, EntropyOrder::new(1.0).unwrap())
    };
    group.bench_function("grid201_t10k", |bencher| {
        bencher.iter(|| hedge_solve(black_box(&space), black_box(&config), &params).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_entropy_index,
    bench_decompose,
    bench_space_build,
    bench_hedge_solve
);
criterion_main!(benches);
