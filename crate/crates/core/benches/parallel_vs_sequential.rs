//! Advances a bank of MALA chains on a Gaussian-design posterior, once
//! through the sequential map and once through the rayon map.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ewlr::data_io::{gen_gaussian_design, GaussianDesignConfig};
use ewlr::par;
use ewlr::posterior::PosteriorSpec;
use ewlr::sampler::{run_mala, ChainState};

const STEPS: usize = 20;

fn chains(count: usize, dim: usize) -> Vec<ChainState> {
    (0..count)
        .map(|i| ChainState::from_prior(2.0, dim, 0.05, 3, i as u64).unwrap())
        .collect()
}

fn bench(c: &mut Criterion) {
    let data = gen_gaussian_design(&GaussianDesignConfig::diagonal(200, 5, 2.0, 1)).unwrap();
    let spec = PosteriorSpec::new(2.0, 5, data.examples()).unwrap();
    let mut group = c.benchmark_group("mala_chain_bank");
    group.sample_size(10);
    for count in [64usize, 512] {
        group.bench_with_input(BenchmarkId::new("sequential", count), &count, |b, &count| {
            b.iter_batched_ref(
                || chains(count, 5),
                |bank| black_box(par::seq::map_mut(bank, |_, s| run_mala(&spec, s, STEPS))),
                criterion::BatchSize::LargeInput,
            )
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("rayon", count), &count, |b, &count| {
            b.iter_batched_ref(
                || chains(count, 5),
                |bank| black_box(par::rayon_impl::map_mut(bank, |_, s| run_mala(&spec, s, STEPS))),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
