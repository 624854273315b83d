use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use cifc_core::channel::{canonical_channel, ChannelKind};
use cifc_core::polytope::{fme_project, MembershipOracle};
use cifc_core::probability::sample_factored_with;
use cifc_core::region::{builtin_schema, instantiate_with_channel, RateSystem, SchemaId};
use cifc_core::verification::{trace_frontier_with, FrontierOptions};

fn system(id: SchemaId, seed: u64) -> RateSystem {
    let s = builtin_schema(id).unwrap();
    let c = canonical_channel(ChannelKind::BscPair {
        eps1: 0.05,
        eps2: 0.1,
    })
    .unwrap();
    let d = sample_factored_with(&s.input_rvs(), &s.factorization, seed, 0.3).unwrap();
    instantiate_with_channel(&s, &d, &c).unwrap()
}

fn projection(c: &mut Criterion) {
    let mut g = c.benchmark_group("fme_project");
    for id in [
        SchemaId::Rtd,
        SchemaId::RtdIn,
        SchemaId::Jiang,
        SchemaId::Maric,
    ] {
        let sys = system(id, 5);
        g.bench_function(id.as_str(), |b| b.iter(|| fme_project(black_box(&sys))));
    }
    g.finish();

    let sys = system(SchemaId::Rtd, 5);
    c.bench_function("oracle_build/RTD", |b| {
        b.iter(|| MembershipOracle::new(black_box(&sys)))
    });
}

fn frontier(c: &mut Criterion) {
    let ch = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
    let opts = FrontierOptions {
        budget: 200,
        grid: 5,
        ..FrontierOptions::default()
    };
    let mut g = c.benchmark_group("frontier");
    g.sample_size(10);
    g.bench_function("RTD budget 200 grid 5", |b| {
        b.iter_batched(
            || opts.clone(),
            |o| trace_frontier_with(SchemaId::Rtd, &ch, &o),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, projection, frontier);
criterion_main!(benches);
