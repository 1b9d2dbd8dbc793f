use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linbai_bench::{multivariate, soare_env};
use linbai_core::algorithms::{build, run_episode};
use linbai_core::design::{g_optimal, xy_optimal};
use linbai_core::{AlgoConfig, AlgorithmKind, DesignContext, EstimatorState, FwSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn designs(c: &mut Criterion) {
    let fw = FwSettings::default();
    let mut group = c.benchmark_group("frank_wolfe");
    let soare = soare_env(10, 0.1, 1).arms().clone();
    group.bench_function("g_optimal/soare_d10", |b| b.iter(|| g_optimal(black_box(&soare), &fw)));
    for slots in [3, 4, 5] {
        let arms = multivariate(slots);
        let all: Vec<usize> = (0..arms.len()).collect();
        group.bench_with_input(BenchmarkId::new("g_optimal/multivariate", slots), &arms, |b, a| {
            b.iter(|| g_optimal(black_box(a), &fw))
        });
        group.bench_with_input(BenchmarkId::new("xy_optimal/multivariate", slots), &arms, |b, a| {
            b.iter(|| xy_optimal(black_box(a), &all, &fw))
        });
    }
    group.finish();
}

fn estimator(c: &mut Criterion) {
    let env = soare_env(10, 0.1, 1);
    let ctx = DesignContext::new(env.arms().clone(), FwSettings::default()).unwrap();
    let design = ctx.g_design().clone();
    c.bench_function("ips_update/soare_d10", |b| {
        let mut state = EstimatorState::new(10);
        b.iter(|| state.ips_update(&design, black_box(10), 1.5))
    });
}

fn episodes(c: &mut Criterion) {
    let env = soare_env(10, 0.1, 5000);
    let ctx = Arc::new(DesignContext::new(env.arms().clone(), FwSettings::default()).unwrap());
    let config = AlgoConfig::default();
    let mut group = c.benchmark_group("episode/soare_d10_T5000");
    group.sample_size(20);
    for kind in [AlgorithmKind::GBai, AlgorithmKind::P1Rage, AlgorithmKind::P1Peace, AlgorithmKind::MixedPeace] {
        // Warm the design cache so the timing covers sampling and estimation.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut warm = build(kind, ctx.clone(), env.horizon(), &config).unwrap();
        run_episode(warm.as_mut(), &env, &mut rng).unwrap();
        group.bench_function(kind.name(), |b| {
            b.iter(|| {
                let mut algo = build(kind, ctx.clone(), env.horizon(), &config).unwrap();
                run_episode(algo.as_mut(), &env, &mut rng).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, designs, estimator, episodes);
criterion_main!(benches);
