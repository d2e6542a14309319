use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gptcheck_bench::{random_set, teleport_instance};
use gptcheck_core::chainsim::{probability_p1, scenario_p1, Direction, OracleMode};
use gptcheck_core::reductions::chain_generators;
use gptcheck_core::{brute_force_chain, teleport_brute, teleport_channel, ChainSpec, TeleportPlan, Word};

fn single_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("teleport");
    for d in [1usize, 2, 3] {
        let (omega, h, w) = teleport_instance(d as u64, d);
        g.bench_with_input(BenchmarkId::new("closed_form", d), &d, |b, _| {
            b.iter(|| teleport_channel(&omega, &h).unwrap().apply(&w).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("contraction", d), &d, |b, _| {
            b.iter(|| teleport_brute(&omega, &h, &w).unwrap())
        });
    }
    g.finish();
}

fn chain(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_p1");
    g.sample_size(20);
    let cs = ChainSpec::new(chain_generators(&random_set(3, 2, 3)).unwrap()).unwrap();
    for len in [1usize, 3] {
        let plan = TeleportPlan::plus(Direction::EvenForward, Word::new((0..len).map(|i| i % 2 + 1).collect()));
        let sc = scenario_p1(0, 0, &plan).unwrap();
        g.bench_with_input(BenchmarkId::new("closed_form", len), &len, |b, _| {
            b.iter(|| probability_p1(&cs, 0, 0, &plan).unwrap())
        });
        for (name, mode) in [("streaming", OracleMode::Streaming), ("full", OracleMode::Full)] {
            g.bench_with_input(BenchmarkId::new(name, len), &len, |b, _| {
                b.iter(|| brute_force_chain(&cs, &sc, mode).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, single_step, chain);
criterion_main!(benches);
