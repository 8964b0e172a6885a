use std::time::Duration;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use mbbp::{exact_search, peel, random_init_solution, SearchState, TabuParams, UnbalanceVariant};
use mbbp_bench::{dense, planted};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tabu_search(c: &mut Criterion) {
    let g = dense(250, 0.95, 1);
    let params = TabuParams { depth: 1000, alpha: 0.30 };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut state = SearchState::new(&g);
    c.bench_function("restart G(250,0.95) L=1000", |b| {
        b.iter(|| {
            let start = random_init_solution(&g, &mut rng).unwrap();
            state.load(&g, &start).unwrap();
            state.run(&g, &params, UnbalanceVariant::Bound2, &mut rng)
        })
    });
}

fn exact(c: &mut Criterion) {
    let g = dense(14, 0.6, 2);
    c.bench_function("exact G(14,0.6)", |b| b.iter(|| exact_search(&g, 0, None).unwrap()));
}

fn peeling(c: &mut Criterion) {
    let g = planted(200, 100, 0.03, 3);
    c.bench_function("peel 200 sparse blocks at 3", |b| {
        b.iter_batched(|| g.clone(), |mut h| peel(&mut h, 3), BatchSize::LargeInput)
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().measurement_time(Duration::from_secs(5)).sample_size(20);
    targets = tabu_search, exact, peeling
}
criterion_main!(benches);
