//! Numerical invariant suites, runnable from the command line.
//!
//! Each check draws its inputs from `stream(seed, [check index])` and
//! reports the worst deviation it saw.

use rand::Rng;
use serde::Serialize;

use crate::analysis::{binomial_tail_at_least, binomial_tail_at_most, hoeffding_bound, supremacy_margin, trace_distance_fidelity_bounds};
use crate::circuit::{all_stabilizers, Gate, StabilizerDecomposition};
use crate::decompose::decompose_in_pauli_basis;
use crate::hamiltonian::{exact_diagonalize, rescale, HamiltonianSpec};
use crate::hypergraph::random_bms_hypergraph;
use crate::kernels::{monte_carlo_pass_rate, AdaptiveTest, PauliTermTest, SingleCopyTest};
use crate::measure::{total_variation, BasisSampler};
use crate::pauli::{Pauli, PauliString};
use crate::protocol::engine::{run_hypergraph_protocol, RunOptions};
use crate::protocol::{ProtocolKind, ProtocolParams, Prover, ProverModel};
use crate::random::{random_circuit, random_density_matrix, random_pauli_sum, random_pure_state};
use crate::rng::stream;
use crate::state::{hermitian_eigenvalues, max_abs_diff, pauli_matrix, pauli_sum_matrix, DenseState, Operator};
use crate::{Complex64, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest deviation observed (its meaning depends on the check).
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub quick: bool,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Acc {
    cases: usize,
    worst: f64,
}

impl Acc {
    fn new() -> Self {
        Acc { cases: 0, worst: 0.0 }
    }

    fn see(&mut self, v: f64) {
        self.cases += 1;
        // NaN must not pass silently.
        if v.is_nan() || v > self.worst {
            self.worst = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    fn done(self, name: &'static str, tolerance: f64) -> CheckResult {
        CheckResult {
            name,
            passed: self.worst <= tolerance,
            cases: self.cases,
            worst: self.worst,
            tolerance,
        }
    }
}

type Check = fn(u64, usize) -> Result<CheckResult>;

const CHECKS: &[Check] = &[
    pauli_round_trip,
    born_sampler,
    pure_vs_density,
    rescaled_spectrum,
    hypergraph_identities,
    clifford_rule_table,
    circuit_conjugation,
    branch_sum,
    graph_state_equivalence,
    kernel_monte_carlo,
    honest_hypergraph,
    fidelity_inequalities,
    tails_below_hoeffding,
    margin_monotone,
];

/// Runs every check; `quick` shrinks the case counts.
pub fn run_selftest(seed: u64, quick: bool) -> Result<SelftestReport> {
    let scale = if quick { 1 } else { 4 };
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, c)| c(crate::rng::mix(seed, &[i as u64]), scale))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelftestReport {
        seed,
        quick,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Operator {
    let d = 1 << n;
    let m = Operator::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn pauli_round_trip(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..4 * scale {
        let n = 1 + c % 5;
        let h = random_hermitian(n, &mut rng);
        let back = pauli_sum_matrix(n, &decompose_in_pauli_basis(&h)?)?;
        acc.see(max_abs_diff(&h, &back));
    }
    Ok(acc.done("pauli_decomposition_round_trip", 1e-8))
}

fn born_sampler(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let samples = 100_000;
    let mut acc = Acc::new();
    for c in 0..2 * scale {
        let n = 1 + c % 4;
        let state = random_density_matrix(n, 2, &mut rng)?;
        let bases: Vec<Pauli> = (0..n).map(|_| [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)]).collect();
        let sampler = BasisSampler::new(&state, &bases)?;
        let mut counts = vec![0u64; 1 << n];
        for _ in 0..samples {
            counts[sampler.sample_bits(&mut rng) as usize] += 1;
        }
        // Ratio to the allowed distance 3·√(2^N / samples).
        let allowed = 3.0 * ((1 << n) as f64 / samples as f64).sqrt();
        acc.see(total_variation(&counts, sampler.probabilities()) / allowed);
    }
    Ok(acc.done("born_sampler_convergence", 1.0))
}

fn pure_vs_density(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..5 * scale {
        let n = 1 + c % 5;
        let psi = random_pure_state(n, &mut rng)?;
        let rho = psi.to_mixed()?;
        for p in random_pauli_sum(n, 4, &mut rng) {
            let p = p.with_coeff(1.0);
            let a = crate::state::expectation(&psi, &p)?;
            let b = crate::state::expectation(&rho, &p)?;
            acc.see((a - b).abs().max(a.abs() - 1.0));
        }
    }
    Ok(acc.done("pure_and_density_expectations_agree", 1e-10))
}

fn rescaled_spectrum(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..3 * scale {
        let n = 1 + c % 4;
        let h = HamiltonianSpec::new(n, random_pauli_sum(n, 2 + n, &mut rng))?;
        let spec = exact_diagonalize(&h)?;
        if spec.first_excited_energy.is_none() {
            continue;
        }
        let rh = rescale(&h)?;
        let eig = hermitian_eigenvalues(&rh.dense()?);
        let second = eig.iter().copied().find(|&e| e > 1e-6).unwrap_or(f64::INFINITY);
        acc.see(eig[0].abs().max(1.0 - second).max(-rh.c0()));
    }
    Ok(acc.done("rescaled_hamiltonian_spectrum", 1e-8))
}

fn hypergraph_identities(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..3 * scale {
        let n = 2 + c % 4;
        let g = random_bms_hypergraph(n, 0.5, &mut rng)?;
        let state = g.build_state()?;
        let amps = state.amplitudes().expect("hypergraph states are pure");
        let dim = 1 << n;
        let id = Operator::identity(dim, dim);
        let mut product = id.clone();
        for i in 0..n {
            let gi = g.stabilizer_dense(i)?;
            let v = nalgebra::DVector::from_column_slice(amps);
            let fixed = (&gi * &v - &v).camax();
            acc.see(max_abs_diff(&(&gi * &gi), &id).max(max_abs_diff(&gi, &gi.adjoint())).max(fixed));
            acc.see(max_abs_diff(&g.adaptive_form(i)?.expansion_dense()?, &gi));
            product = product * (&id + &gi) * Complex64::new(0.5, 0.0);
        }
        acc.see(max_abs_diff(&product, &state.density_matrix()?));
    }
    Ok(acc.done("hypergraph_stabilizer_identities", 1e-10))
}

fn clifford_rule_table(_seed: u64, _scale: usize) -> Result<CheckResult> {
    let n = 2;
    let gates = [
        Gate::H(0),
        Gate::S(0),
        Gate::Sdg(0),
        Gate::X(0),
        Gate::Y(0),
        Gate::Z(0),
        Gate::Cz(0, 1),
        Gate::Cnot(0, 1),
        Gate::Cnot(1, 0),
    ];
    let mut acc = Acc::new();
    for g in &gates {
        let c = crate::circuit::CircuitSpec::new(n, vec![g.clone()])?;
        let u = c.unitary()?;
        for label in ["XI", "YI", "ZI", "IX", "IY", "IZ"] {
            let p = PauliString::parse(label, 1.0)?;
            let want = &u * pauli_matrix(&p)? * u.adjoint();
            let got = pauli_sum_matrix(n, &crate::circuit::conjugate_pauli(&c, &p)?)?;
            acc.see(max_abs_diff(&want, &got));
        }
    }
    Ok(acc.done("clifford_rule_table", 1e-12))
}

fn circuit_conjugation(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..3 * scale {
        let n = 2 + c % 3;
        let circ = random_circuit(n, 8, &mut rng)?;
        let u = circ.unitary()?;
        let decomps = all_stabilizers(&circ)?;
        let psi = circ.prepare_state()?;
        let dim = 1 << n;
        let id = Operator::identity(dim, dim);
        let mut product = id.clone();
        for (i, d) in decomps.iter().enumerate() {
            let want = &u * pauli_matrix(&PauliString::single(n, i, Pauli::X, 1.0))? * u.adjoint();
            let from_dense = StabilizerDecomposition::from_dense(i, &want)?;
            acc.see(max_abs_diff(&d.dense()?, &want).max(max_abs_diff(&from_dense.dense()?, &want)));
            product = product * (&id + &d.dense()?) * Complex64::new(0.5, 0.0);
        }
        acc.see(max_abs_diff(&product, &psi.density_matrix()?));
    }
    Ok(acc.done("circuit_stabilizer_conjugation", 1e-8))
}

fn branch_sum(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..3 * scale {
        let n = 2 + c % 4;
        let g = random_bms_hypergraph(n, 0.5, &mut rng)?;
        let rho = random_density_matrix(n, 3, &mut rng)?;
        for i in 0..n {
            let test = AdaptiveTest::new(&g.adaptive_form(i)?);
            let closed = 0.5 * (1.0 + rho.expectation_operator(&g.stabilizer_dense(i)?)?);
            let p = test.branch_sum_ppass(&rho)?;
            acc.see((p - closed).abs().max(-p).max(p - 1.0));
        }
    }
    Ok(acc.done("adaptive_branch_sum_equals_closed_form", 1e-10))
}

fn graph_state_equivalence(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..3 * scale {
        let n = 2 + c % 4;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(0.5) {
                    edges.push(vec![a, b]);
                }
            }
        }
        let g = crate::hypergraph::HypergraphSpec::new(n, edges)?;
        let rho = random_density_matrix(n, 2, &mut rng)?;
        let decomps = all_stabilizers(&g.to_circuit())?;
        for (i, d) in decomps.iter().enumerate() {
            let adaptive = AdaptiveTest::new(&g.adaptive_form(i)?).exact_ppass(&rho)?;
            let plain = PauliTermTest::stabilizer(d)?.exact_ppass(&rho)?;
            acc.see((adaptive - plain).abs() + if d.terms().len() == 1 { 0.0 } else { 1.0 });
        }
    }
    Ok(acc.done("graph_state_adaptive_matches_stabilizer_test", 1e-10))
}

fn kernel_monte_carlo(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let trials = 20_000 * scale;
    let mut acc = Acc::new();
    for c in 0..scale {
        let n = 2 + c % 3;
        let g = random_bms_hypergraph(n, 0.6, &mut rng)?;
        let rho = random_density_matrix(n, 2, &mut rng)?;
        let adaptive = AdaptiveTest::new(&g.adaptive_form(0)?);
        let circ = random_circuit(n, 6, &mut rng)?;
        let stab = PauliTermTest::stabilizer(&crate::circuit::conjugate_through_circuit(&circ, 0)?)?;
        let h = HamiltonianSpec::new(n, random_pauli_sum(n, 3, &mut rng))?;
        let tests: Vec<Box<dyn SingleCopyTest>> = match rescale(&h) {
            Ok(rh) => vec![Box::new(adaptive), Box::new(stab), Box::new(PauliTermTest::energy(&rh)?)],
            Err(_) => vec![Box::new(adaptive), Box::new(stab)],
        };
        for (j, t) in tests.iter().enumerate() {
            let p = t.exact_ppass(&rho)?;
            let rate = monte_carlo_pass_rate(t.as_ref(), &rho, trials, rng.random::<u64>() ^ j as u64)?;
            // Deviation in units of the binomial standard error.
            let sigma = rate.sigma_at(p).max(1.0 / trials as f64);
            acc.see((rate.rate() - p).abs() / sigma);
        }
    }
    Ok(acc.done("kernel_monte_carlo_within_4_sigma", 4.0))
}

fn honest_hypergraph(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..2 * scale {
        let n = 2 + c % 5;
        let g = random_bms_hypergraph(n, 0.5, &mut rng)?;
        let ideal = g.build_state()?;
        let forms = g.adaptive_forms()?;
        let prover = Prover::new(&ProverModel::Honest, &ideal)?;
        let params = ProtocolParams::desk(ProtocolKind::Hypergraph, n, 40, 10, 0.05)?;
        let s = rng.random::<u64>();
        let a = run_hypergraph_protocol(&ideal, &forms, &prover, &params, s, RunOptions { record_trials: true })?;
        let b = run_hypergraph_protocol(&ideal, &forms, &prover, &params, s, RunOptions { record_trials: true })?;
        let bad = !(a.accepted && a.all_trials_passed) || a.trials != b.trials;
        acc.see(if bad { 1.0 } else { 0.0 });
    }
    Ok(acc.done("honest_hypergraph_accepts_and_replays", 0.0))
}

fn fidelity_inequalities(seed: u64, scale: usize) -> Result<CheckResult> {
    let mut rng = stream(seed, &[]);
    let mut acc = Acc::new();
    for c in 0..4 * scale {
        let n = 1 + c % 4;
        let g = random_bms_hypergraph(n.max(2), 0.5, &mut rng)?;
        let ideal = g.build_state()?;
        let n = ideal.n_qubits();
        let noise = random_density_matrix(n, 1 + c % 3, &mut rng)?;
        let rho = DenseState::mix_with(&ideal, &noise, rng.random_range(0.0..1.0))?;
        let b = trace_distance_fidelity_bounds(&rho, &ideal)?;
        acc.see((b.trace_distance - b.sqrt_infidelity).max(0.5 * b.x_basis_l1 - b.trace_distance));
    }
    Ok(acc.done("trace_distance_and_povm_bounds", 1e-9))
}

fn tails_below_hoeffding(_seed: u64, scale: usize) -> Result<CheckResult> {
    let mut acc = Acc::new();
    for &k in &[10u64, 50, 200, 1000][..2 + scale.min(2)] {
        for pi in 1..10 {
            let p = pi as f64 / 10.0;
            for ti in 1..6 {
                let t = ti as f64 / 20.0;
                let hi = ((p + t) * k as f64).ceil() as u64;
                let lo = ((p - t) * k as f64).floor();
                let h = hoeffding_bound(k, t);
                if hi <= k {
                    acc.see(binomial_tail_at_least(k, p, hi) - h);
                }
                if lo >= 0.0 {
                    acc.see(binomial_tail_at_most(k, p, lo as u64) - h);
                }
            }
        }
    }
    Ok(acc.done("binomial_tails_below_hoeffding", 1e-12))
}

fn margin_monotone(_seed: u64, _scale: usize) -> Result<CheckResult> {
    let mut acc = Acc::new();
    let grid: Vec<f64> = (0..=20).map(|i| 1.0 - (i as f64 / 20.0).powi(4) * 1e-3).collect();
    let errs = [0.0, 1e-4, 1.0 / 400.0, 1.0 / 193.0, 0.01];
    for w in grid.windows(2) {
        for &s in &errs {
            let (hi, lo) = (supremacy_margin(w[0], s)?, supremacy_margin(w[1], s)?);
            acc.see(lo.margin - hi.margin);
        }
    }
    for w in errs.windows(2) {
        for &f in &grid {
            acc.see(supremacy_margin(f, w[1])?.margin - supremacy_margin(f, w[0])?.margin);
        }
    }
    Ok(acc.done("supremacy_margin_monotone", 0.0))
}
