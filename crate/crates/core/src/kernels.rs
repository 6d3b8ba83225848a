//! The three single-copy tests.
//!
//! Every test is a finite set of measurement settings ("slots"), a rule for
//! choosing one, and a pass predicate on the joint outcome bits. Sampling a
//! test on a register draws the slot, then one Born sample in that slot's
//! bases. Closed-form pass probabilities are provided alongside.

use std::sync::OnceLock;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::RngCore;
use serde::Serialize;

use crate::circuit::StabilizerDecomposition;
use crate::hamiltonian::RescaledHamiltonian;
use crate::hypergraph::AdaptiveStabilizerForm;
use crate::measure::{BasisSampler, MeasurementRecord};
use crate::pauli::{Pauli, PauliString};
use crate::rng::{stream, TAG_MONTE_CARLO};
use crate::state::{check_width, expectation, expectation_projected, qubit_bit, DenseState, Operator};
use crate::{par, Error, Result};

/// What the verifier drew before judging a record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    /// Index into the test's term list.
    Term { index: usize },
    /// Adaptive test: the bits `a` read on `W̃_P` and the resolved rule.
    Assignment { a: Vec<bool>, alpha: u8, z_support: Vec<usize> },
}

impl Branch {
    /// Compact label for CSV output.
    pub fn label(&self) -> String {
        match self {
            Branch::Term { index } => format!("term:{index}"),
            Branch::Assignment { a, .. } => {
                let bits: String = a.iter().map(|&b| if b { '1' } else { '0' }).collect();
                format!("a:{bits}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TestOutcome {
    pub passed: bool,
    pub branch: Branch,
    pub record: MeasurementRecord,
}

pub trait SingleCopyTest: Send + Sync {
    fn n_qubits(&self) -> usize;

    fn slots(&self) -> usize;

    fn bases(&self, slot: usize) -> &[Pauli];

    fn choose(&self, rng: &mut dyn RngCore) -> usize;

    /// Pass predicate on the dense outcome index (bit set means `-1`).
    fn judge(&self, slot: usize, bits: u64) -> bool;

    fn branch(&self, slot: usize, bits: u64) -> Branch;

    fn exact_ppass(&self, state: &DenseState) -> Result<f64>;
}

/// Energy or stabilizer test: draw term `j` with probability `|c_j|/R`,
/// measure `τ_j`, pass iff `Π m = sgn(c_j)`.
#[derive(Clone, Debug)]
pub struct PauliTermTest {
    n: usize,
    terms: Vec<PauliString>,
    r: f64,
    bases: Vec<Vec<Pauli>>,
    negative: Vec<bool>,
    picker: WeightedIndex<f64>,
}

impl PauliTermTest {
    fn build(n: usize, terms: &[PauliString], weights: &[f64], r: f64) -> Result<Self> {
        let picker = WeightedIndex::new(weights.iter().copied())
            .map_err(|e| Error::invalid(format!("bad sampling weights: {e}")))?;
        Ok(PauliTermTest {
            n,
            terms: terms.to_vec(),
            r,
            bases: terms.iter().map(PauliString::paulis).collect(),
            negative: terms.iter().map(|t| t.coeff() < 0.0).collect(),
            picker,
        })
    }

    pub fn energy(rh: &RescaledHamiltonian) -> Result<Self> {
        Self::build(rh.n_qubits(), rh.terms(), rh.sampling_weights(), rh.r())
    }

    pub fn stabilizer(d: &StabilizerDecomposition) -> Result<Self> {
        Self::build(d.n_qubits(), d.terms(), d.sampling_weights(), d.r())
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `Tr[ρ O]` for `O = Σ_j c_j τ_j`.
    pub fn operator_expectation(&self, state: &DenseState) -> Result<f64> {
        check_width(self.n, state.n_qubits())?;
        self.terms.iter().map(|t| expectation(state, t)).sum()
    }
}

impl SingleCopyTest for PauliTermTest {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn slots(&self) -> usize {
        self.terms.len()
    }

    fn bases(&self, slot: usize) -> &[Pauli] {
        &self.bases[slot]
    }

    fn choose(&self, rng: &mut dyn RngCore) -> usize {
        self.picker.sample(rng)
    }

    fn judge(&self, slot: usize, bits: u64) -> bool {
        // Unmeasured qubits never carry a set bit.
        let odd = bits.count_ones() % 2 == 1;
        odd == self.negative[slot]
    }

    fn branch(&self, slot: usize, _bits: u64) -> Branch {
        Branch::Term { index: slot }
    }

    /// `1/2 + Tr[ρ O]/(2R)`.
    fn exact_ppass(&self, state: &DenseState) -> Result<f64> {
        Ok(0.5 + self.operator_expectation(state)? / (2.0 * self.r))
    }
}

/// Largest projector support for which the resolver is tabulated up front.
const TABLE_LIMIT: usize = 16;

/// Adaptive stabilizer test for `g_i` of a hypergraph state: `X` on `v_i`,
/// `Z` elsewhere, pass iff `(-1)^α x_i Π_{W̃_Z(a)} z = 1`.
#[derive(Clone, Debug)]
pub struct AdaptiveTest {
    form: AdaptiveStabilizerForm,
    bases: Vec<Pauli>,
    x_mask: u64,
    /// Dense-index bit of each projector-support vertex, in support order.
    support_bits: Vec<u64>,
    /// `(α, dense mask of W̃_Z)` per assignment code, when tabulated.
    table: Option<Vec<(u8, u64)>>,
}

impl AdaptiveTest {
    pub fn new(form: &AdaptiveStabilizerForm) -> Self {
        let n = form.n_vertices();
        let mut bases = vec![Pauli::Z; n];
        bases[form.vertex()] = Pauli::X;
        let support_bits: Vec<u64> = form.projector_support().iter().map(|&v| qubit_bit(n, v)).collect();
        let table = (support_bits.len() <= TABLE_LIMIT).then(|| {
            let m = support_bits.len();
            (0..1usize << m)
                .map(|code| {
                    let a: Vec<bool> = (0..m).map(|j| code >> j & 1 == 1).collect();
                    let r = form.resolve(&a).expect("width matches");
                    (r.alpha, mask_of(n, &r.z_support))
                })
                .collect()
        });
        AdaptiveTest {
            form: form.clone(),
            bases,
            x_mask: qubit_bit(n, form.vertex()),
            support_bits,
            table,
        }
    }

    pub fn form(&self) -> &AdaptiveStabilizerForm {
        &self.form
    }

    fn assignment(&self, bits: u64) -> Vec<bool> {
        self.support_bits.iter().map(|&b| bits & b != 0).collect()
    }

    fn rule(&self, bits: u64) -> (u8, u64) {
        match &self.table {
            Some(t) => {
                let code = self
                    .support_bits
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (j, &b)| acc | (((bits & b != 0) as usize) << j));
                t[code]
            }
            None => {
                let r = self.form.resolve(&self.assignment(bits)).expect("width matches");
                (r.alpha, mask_of(self.form.n_vertices(), &r.z_support))
            }
        }
    }

    /// `Σ_a (Tr[ρ P_a] + Tr[ρ P_a S_a]) / 2` with
    /// `S_a = (-1)^α X_{v_i} Z(W̃_Z(a))`.
    pub fn branch_sum_ppass(&self, state: &DenseState) -> Result<f64> {
        let n = self.form.n_vertices();
        check_width(n, state.n_qubits())?;
        let probs = state.diagonal_probabilities();
        let pmask = self.support_bits.iter().fold(0, |m, &b| m | b);
        let mut total = 0.0;
        for (a, res) in self.form.resolution_table()? {
            let pval = self
                .support_bits
                .iter()
                .zip(&a)
                .fold(0u64, |m, (&b, &on)| if on { m | b } else { m });
            let p_a: f64 = probs
                .iter()
                .enumerate()
                .filter(|(b, _)| *b as u64 & pmask == pval)
                .map(|(_, p)| p)
                .sum();
            let mut s = PauliString::single(n, self.form.vertex(), Pauli::X, if res.alpha == 1 { -1.0 } else { 1.0 });
            for &v in &res.z_support {
                s.set(v, Pauli::Z);
            }
            total += (p_a + expectation_projected(state, &s, pmask, pval)?) / 2.0;
        }
        Ok(total)
    }
}

fn mask_of(n: usize, vs: &[usize]) -> u64 {
    vs.iter().fold(0, |m, &v| m | qubit_bit(n, v))
}

impl SingleCopyTest for AdaptiveTest {
    fn n_qubits(&self) -> usize {
        self.form.n_vertices()
    }

    fn slots(&self) -> usize {
        1
    }

    fn bases(&self, _slot: usize) -> &[Pauli] {
        &self.bases
    }

    fn choose(&self, _rng: &mut dyn RngCore) -> usize {
        0
    }

    fn judge(&self, _slot: usize, bits: u64) -> bool {
        let (alpha, zmask) = self.rule(bits);
        let x = (bits & self.x_mask != 0) as u32;
        (alpha as u32 + x + (bits & zmask).count_ones()).is_multiple_of(2)
    }

    fn branch(&self, _slot: usize, bits: u64) -> Branch {
        let a = self.assignment(bits);
        let r = self.form.resolve(&a).expect("width matches");
        Branch::Assignment {
            a,
            alpha: r.alpha,
            z_support: r.z_support,
        }
    }

    /// Branch-sum form; equals `(1 + Tr[ρ g_i])/2`.
    fn exact_ppass(&self, state: &DenseState) -> Result<f64> {
        self.branch_sum_ppass(state)
    }
}

/// A test bound to one register state, with Born samplers built on first
/// use of each slot.
pub struct PreparedTest<'a, T: SingleCopyTest + ?Sized> {
    test: &'a T,
    state: &'a DenseState,
    samplers: Vec<OnceLock<BasisSampler>>,
}

impl<'a, T: SingleCopyTest + ?Sized> PreparedTest<'a, T> {
    pub fn new(test: &'a T, state: &'a DenseState) -> Result<Self> {
        check_width(test.n_qubits(), state.n_qubits())?;
        Ok(PreparedTest {
            test,
            state,
            samplers: (0..test.slots()).map(|_| OnceLock::new()).collect(),
        })
    }

    fn sampler(&self, slot: usize) -> &BasisSampler {
        self.samplers[slot]
            .get_or_init(|| BasisSampler::new(self.state, self.test.bases(slot)).expect("width checked at construction"))
    }

    /// One trial; returns `(slot, outcome bits, passed)`.
    pub fn run_raw(&self, rng: &mut dyn RngCore) -> (usize, u64, bool) {
        let slot = self.test.choose(rng);
        let bits = self.sampler(slot).sample_bits(rng);
        (slot, bits, self.test.judge(slot, bits))
    }

    pub fn run(&self, rng: &mut dyn RngCore) -> TestOutcome {
        let (slot, bits, passed) = self.run_raw(rng);
        TestOutcome {
            passed,
            branch: self.test.branch(slot, bits),
            record: MeasurementRecord::from_bits(self.test.bases(slot), bits),
        }
    }
}

/// One sampled test on a fresh register.
pub fn run_test<T: SingleCopyTest + ?Sized>(test: &T, state: &DenseState, rng: &mut dyn RngCore) -> Result<TestOutcome> {
    Ok(PreparedTest::new(test, state)?.run(rng))
}

pub fn energy_test(rho: &DenseState, rh: &RescaledHamiltonian, rng: &mut dyn RngCore) -> Result<TestOutcome> {
    run_test(&PauliTermTest::energy(rh)?, rho, rng)
}

/// `1/2 + Tr[ρH']/(2R)`.
pub fn energy_test_exact_ppass(rho: &DenseState, rh: &RescaledHamiltonian) -> Result<f64> {
    PauliTermTest::energy(rh)?.exact_ppass(rho)
}

pub fn stabilizer_test(rho: &DenseState, d: &StabilizerDecomposition, rng: &mut dyn RngCore) -> Result<TestOutcome> {
    run_test(&PauliTermTest::stabilizer(d)?, rho, rng)
}

/// `1/2 + Tr[ρ g_i]/(2R_i)`, with `Tr[ρ g_i]` from the dense `g_i`.
pub fn stabilizer_test_exact_ppass(rho: &DenseState, d: &StabilizerDecomposition) -> Result<f64> {
    let g = d.dense()?;
    Ok(0.5 + rho.expectation_operator(&g)? / (2.0 * d.r()))
}

pub fn adaptive_stabilizer_test(rho: &DenseState, form: &AdaptiveStabilizerForm, rng: &mut dyn RngCore) -> Result<TestOutcome> {
    run_test(&AdaptiveTest::new(form), rho, rng)
}

/// Both evaluations of the adaptive pass probability.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AdaptivePpass {
    /// `(1 + Tr[ρ g_i])/2`.
    pub closed_form: f64,
    /// `Σ_a (Tr[ρ P_a] + Tr[ρ P_a S_a])/2`.
    pub branch_sum: f64,
}

pub fn adaptive_test_exact_ppass(rho: &DenseState, form: &AdaptiveStabilizerForm, g_dense: &Operator) -> Result<AdaptivePpass> {
    Ok(AdaptivePpass {
        closed_form: (1.0 + rho.expectation_operator(g_dense)?) / 2.0,
        branch_sum: AdaptiveTest::new(form).branch_sum_ppass(rho)?,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PassRate {
    pub passes: u64,
    pub trials: u64,
}

impl PassRate {
    pub fn rate(&self) -> f64 {
        self.passes as f64 / self.trials as f64
    }

    /// Binomial standard error at success probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `|rate − p| ≤ z·σ(p)`, with a floor of one count so that `p ∈ {0, 1}`
    /// only accepts exact agreement.
    pub fn within(&self, p: f64, z: f64) -> bool {
        let tol = (z * self.sigma_at(p)).max(0.5 / self.trials as f64);
        (self.rate() - p).abs() <= tol
    }
}

fn trial_passes<T: SingleCopyTest + ?Sized>(prep: &PreparedTest<'_, T>, seed: u64, t: usize) -> bool {
    let mut rng = stream(seed, &[TAG_MONTE_CARLO, t as u64]);
    prep.run_raw(&mut rng).2
}

/// Monte Carlo pass count of `trials` independent tests on copies of
/// `state`; trial `t` uses stream `(seed, MONTE_CARLO, t)`.
pub fn monte_carlo_pass_rate<T: SingleCopyTest + ?Sized>(test: &T, state: &DenseState, trials: usize, seed: u64) -> Result<PassRate> {
    let prep = PreparedTest::new(test, state)?;
    let passes = par::count_indexed(trials, |t| trial_passes(&prep, seed, t));
    Ok(PassRate { passes, trials: trials as u64 })
}

pub fn monte_carlo_pass_rate_sequential<T: SingleCopyTest + ?Sized>(test: &T, state: &DenseState, trials: usize, seed: u64) -> Result<PassRate> {
    let prep = PreparedTest::new(test, state)?;
    let passes = par::count_indexed_sequential(trials, |t| trial_passes(&prep, seed, t));
    Ok(PassRate { passes, trials: trials as u64 })
}

#[cfg(feature = "parallel")]
pub fn monte_carlo_pass_rate_parallel<T: SingleCopyTest + ?Sized>(test: &T, state: &DenseState, trials: usize, seed: u64) -> Result<PassRate> {
    let prep = PreparedTest::new(test, state)?;
    let passes = par::count_indexed_parallel(trials, |t| trial_passes(&prep, seed, t));
    Ok(PassRate { passes, trials: trials as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{conjugate_through_circuit, CircuitSpec, Gate};
    use crate::hamiltonian::{rescale, HamiltonianSpec};
    use crate::hypergraph::HypergraphSpec;
    use crate::rng::stream;

    fn minus_z() -> RescaledHamiltonian {
        let h = HamiltonianSpec::new(1, vec![PauliString::parse("Z", -1.0).unwrap()])
            .unwrap()
            .with_ground_energy(-1.0)
            .with_gap(2.0)
            .unwrap();
        rescale(&h).unwrap()
    }

    #[test]
    fn energy_closed_forms() {
        let rh = minus_z();
        let ground = DenseState::basis(1, 0).unwrap();
        let excited = DenseState::basis(1, 1).unwrap();
        let mixed = DenseState::maximally_mixed(1).unwrap();
        assert!((energy_test_exact_ppass(&ground, &rh).unwrap() - 0.5).abs() < 1e-15);
        assert!((energy_test_exact_ppass(&excited, &rh).unwrap() - 1.0).abs() < 1e-15);
        assert!((energy_test_exact_ppass(&mixed, &rh).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn excited_state_always_passes_energy_test() {
        let rh = minus_z();
        let excited = DenseState::basis(1, 1).unwrap();
        let mut rng = stream(1, &[]);
        for _ in 0..200 {
            assert!(energy_test(&excited, &rh, &mut rng).unwrap().passed);
        }
    }

    #[test]
    fn phase_flip_fails_ccz_stabilizer() {
        let c = CircuitSpec::new(3, vec![Gate::Ccz(0, 1, 2)]).unwrap();
        let d = conjugate_through_circuit(&c, 0).unwrap();
        let psi = c.prepare_state().unwrap();
        let flipped = crate::state::apply_pauli(&psi, &PauliString::parse("ZII", 1.0).unwrap()).unwrap();
        assert!((stabilizer_test_exact_ppass(&psi, &d).unwrap() - 0.75).abs() < 1e-12);
        assert!((stabilizer_test_exact_ppass(&flipped, &d).unwrap() - 0.25).abs() < 1e-12);
        let t = PauliTermTest::stabilizer(&d).unwrap();
        assert!((t.exact_ppass(&flipped).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn worked_example_branch_rule() {
        let g = HypergraphSpec::new(3, vec![vec![0, 1, 2]]).unwrap();
        let t = AdaptiveTest::new(&g.adaptive_form(0).unwrap());
        // bits: qubit 0 is the most significant of three.
        let bits = |x: bool, z1: bool, z2: bool| (x as u64) << 2 | (z1 as u64) << 1 | z2 as u64;
        for x in [false, true] {
            for z2 in [false, true] {
                // z_2 = +1: accept iff x = +1.
                assert_eq!(t.judge(0, bits(x, false, z2)), !x);
                // z_2 = -1: accept iff x z_3 = +1.
                assert_eq!(t.judge(0, bits(x, true, z2)), x == z2);
            }
        }
    }

    #[test]
    fn adaptive_ideal_and_flipped() {
        let g = HypergraphSpec::new(4, vec![vec![0, 1, 2], vec![1, 3], vec![0, 2, 3]]).unwrap();
        let state = g.build_state().unwrap();
        let flipped = crate::state::apply_pauli(&state, &PauliString::parse("ZIII", 1.0).unwrap()).unwrap();
        for i in 0..4 {
            let form = g.adaptive_form(i).unwrap();
            let gd = g.stabilizer_dense(i).unwrap();
            let p = adaptive_test_exact_ppass(&state, &form, &gd).unwrap();
            assert!((p.closed_form - 1.0).abs() < 1e-12 && (p.branch_sum - 1.0).abs() < 1e-12);
            let pf = adaptive_test_exact_ppass(&flipped, &form, &gd).unwrap();
            assert!((pf.closed_form - pf.branch_sum).abs() < 1e-12);
            if i == 0 {
                assert!(pf.closed_form.abs() < 1e-12);
            }
            let rate = monte_carlo_pass_rate(&AdaptiveTest::new(&form), &state, 2000, 9).unwrap();
            assert_eq!(rate.passes, 2000);
        }
    }

    #[test]
    fn monte_carlo_is_thread_independent() {
        let rh = minus_z();
        let t = PauliTermTest::energy(&rh).unwrap();
        let s = DenseState::plus(1).unwrap();
        let a = monte_carlo_pass_rate_sequential(&t, &s, 5000, 4).unwrap();
        let b = monte_carlo_pass_rate(&t, &s, 5000, 4).unwrap();
        assert_eq!(a.passes, b.passes);
        assert!(a.within(t.exact_ppass(&s).unwrap(), 4.0));
    }
}
