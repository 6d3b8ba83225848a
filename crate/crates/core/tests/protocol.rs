use pauliverify::analysis::{robustness_sweep, SweepTarget};
use pauliverify::hypergraph::{random_bms_hypergraph, HypergraphSpec};
use pauliverify::protocol::engine::{draw_layout, run_hypergraph_protocol, run_many, RunOptions};
use pauliverify::protocol::{ProtocolKind, ProtocolParams, Prover, ProverModel};
use pauliverify::rng::stream;
use pauliverify::state::DenseState;

fn triangle() -> HypergraphSpec {
    HypergraphSpec::new(3, vec![vec![0, 1, 2]]).unwrap()
}

#[cfg(feature = "parallel")]
#[test]
fn parallel_and_sequential_counts_agree() {
    use pauliverify::kernels::{monte_carlo_pass_rate_parallel, monte_carlo_pass_rate_sequential, AdaptiveTest};
    use pauliverify::par;
    let g = triangle();
    let test = AdaptiveTest::new(&g.adaptive_form(0).unwrap());
    let noisy = g.build_state().unwrap().mix_with(&DenseState::maximally_mixed(3).unwrap(), 0.3).unwrap();
    for seed in [1, 2, 3] {
        let a = monte_carlo_pass_rate_sequential(&test, &noisy, 20_000, seed).unwrap();
        let b = monte_carlo_pass_rate_parallel(&test, &noisy, 20_000, seed).unwrap();
        assert_eq!(a.passes, b.passes);
    }
    let f = |i: usize| i * i % 97;
    assert_eq!(par::map_indexed_sequential(1000, f), par::map_indexed_parallel(1000, f));
}

#[test]
fn layout_target_is_uniform() {
    // N = 2 hypergraph: 2 groups of 2 plus m = 3 discarded, 8 registers.
    let params = ProtocolParams::desk(ProtocolKind::Hypergraph, 2, 2, 3, 0.1).unwrap();
    let total = params.registers().unwrap() as usize;
    assert_eq!(total, 8);
    let draws = 16_000u64;
    let mut counts = vec![0u64; total];
    for seed in 0..draws {
        let (target, tested) = draw_layout(&params, seed).unwrap();
        assert_eq!(tested.len(), 4);
        assert!(!tested.contains(&target));
        counts[target as usize] += 1;
    }
    let expected = draws as f64 / total as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 7 degrees of freedom; 24.3 is the 0.1% quantile.
    assert!(chi2 < 24.3, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn runs_replay_from_their_seed() {
    let g = random_bms_hypergraph(3, 0.5, &mut stream(11, &[])).unwrap();
    let ideal = g.build_state().unwrap();
    let forms = g.adaptive_forms().unwrap();
    let eta = DenseState::maximally_mixed(3).unwrap();
    let prover = Prover::new(&ProverModel::IidDeviated { epsilon_prime: 0.2, eta }, &ideal).unwrap();
    let params = ProtocolParams::desk(ProtocolKind::Hypergraph, 3, 50, 10, 0.1).unwrap();
    let opts = RunOptions { record_trials: true };
    let a = run_many(8, 99, |s| run_hypergraph_protocol(&ideal, &forms, &prover, &params, s, opts)).unwrap();
    let b = run_many(8, 99, |s| run_hypergraph_protocol(&ideal, &forms, &prover, &params, s, opts)).unwrap();
    for (x, y) in a.reports.iter().zip(&b.reports) {
        assert_eq!(x.seed, y.seed);
        assert_eq!(x.trials, y.trials);
        assert_eq!(x.accepted, y.accepted);
    }
    // A single run with the recorded seed reproduces the same trials.
    let one = run_hypergraph_protocol(&ideal, &forms, &prover, &params, a.reports[3].seed, opts).unwrap();
    let mut replay = one.trials.clone();
    replay.iter_mut().for_each(|t| t.run = 3);
    assert_eq!(replay, a.reports[3].trials);
}

#[test]
fn small_deviation_is_accepted_above_bound() {
    // ε′ well below ε: the bound 1 − N e^{−2(ε−ε′)²k} is informative here.
    let g = random_bms_hypergraph(3, 0.5, &mut stream(5, &[])).unwrap();
    let eta = DenseState::maximally_mixed(3).unwrap();
    let params = ProtocolParams::desk(ProtocolKind::Hypergraph, 3, 400, 20, 0.15).unwrap();
    let curve = robustness_sweep(&SweepTarget::Hypergraph { hypergraph: &g }, &eta, &[0.02], &params, 200, 3).unwrap();
    let p = &curve.points[0];
    let bound = 1.0 - 3.0 * (-2.0 * (0.15f64 - 0.02).powi(2) * 400.0).exp();
    assert!((p.bound - bound).abs() < 1e-12);
    assert!(bound > 0.9);
    assert!(p.measured_acceptance >= bound - 3.0 * p.monte_carlo_sigma.max(1e-3));
    assert!(p.predicted_acceptance >= bound);
}

#[test]
fn flipped_register_is_always_rejected() {
    use pauliverify::pauli::{Pauli, PauliString};
    use pauliverify::state::apply_pauli;
    let g = triangle();
    let ideal = g.build_state().unwrap();
    let forms = g.adaptive_forms().unwrap();
    let bad = apply_pauli(&ideal, &PauliString::single(3, 1, Pauli::Z, 1.0)).unwrap();
    let prover = Prover::new(&ProverModel::Fixed { state: bad }, &ideal).unwrap();
    let params = ProtocolParams::desk(ProtocolKind::Hypergraph, 3, 30, 5, 0.1).unwrap();
    let s = run_many(20, 4, |seed| run_hypergraph_protocol(&ideal, &forms, &prover, &params, seed, RunOptions::default())).unwrap();
    assert_eq!(s.accepted, 0);
    assert!(s.reports.iter().all(|r| r.per_group[1].passes == 0));
}
