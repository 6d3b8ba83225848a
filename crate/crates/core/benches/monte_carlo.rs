//! Sequential against rayon-parallel Monte Carlo pass-rate estimation and
//! protocol batches.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pauliverify::hypergraph::random_bms_hypergraph;
use pauliverify::kernels::{monte_carlo_pass_rate_sequential, AdaptiveTest};
use pauliverify::par;
use pauliverify::protocol::engine::{run_hypergraph_protocol, RunOptions};
use pauliverify::protocol::{ProtocolKind, ProtocolParams, Prover, ProverModel};
use pauliverify::rng::{run_seed, stream};
use pauliverify::state::DenseState;

fn pass_rate(c: &mut Criterion) {
    let mut group = c.benchmark_group("pass_rate");
    group.sample_size(20);
    for n in [4usize, 8] {
        let g = random_bms_hypergraph(n, 0.5, &mut stream(1, &[])).unwrap();
        let state = g.build_state().unwrap().mix_with(&DenseState::maximally_mixed(n).unwrap(), 0.1).unwrap();
        let test = AdaptiveTest::new(&g.adaptive_form(0).unwrap());
        let trials = 100_000;
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| monte_carlo_pass_rate_sequential(&test, &state, trials, 7).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| pauliverify::kernels::monte_carlo_pass_rate_parallel(&test, &state, trials, 7).unwrap())
        });
    }
    group.finish();
}

fn protocol_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocol_runs");
    group.sample_size(10);
    let n = 5;
    let g = random_bms_hypergraph(n, 0.5, &mut stream(2, &[])).unwrap();
    let ideal = g.build_state().unwrap();
    let forms = g.adaptive_forms().unwrap();
    let prover = Prover::new(&ProverModel::Honest, &ideal).unwrap();
    let params = ProtocolParams::desk(ProtocolKind::Hypergraph, n, 500, 100, 0.05).unwrap();
    let run = |r: usize| run_hypergraph_protocol(&ideal, &forms, &prover, &params, run_seed(3, r as u64), RunOptions::default()).unwrap().accepted;
    group.bench_function("sequential", |b| b.iter(|| par::map_indexed_sequential(32, run)));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| par::map_indexed_parallel(32, run)));
    group.finish();
}

criterion_group!(benches, pass_rate, protocol_runs);
criterion_main!(benches);
