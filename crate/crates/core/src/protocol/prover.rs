//! Prover models: how the register states are chosen.
//!
//! A realised [`Prover`] holds a small pool of distinct register states and
//! a rule mapping register indices to pool entries. Registers are never
//! materialised one by one; the engine looks up the pool entry of each
//! register it tests.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::circuit::{apply_gate, Gate};
use crate::state::DenseState;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub enum ProverModel {
    /// Every register holds the ideal state.
    Honest,
    /// `(1 − ε′)|ideal><ideal| + ε′ η` in every register.
    IidDeviated { epsilon_prime: f64, eta: DenseState },
    /// `V|ideal>` in every register, `V` given as a gate list.
    CoherentError { gates: Vec<Gate> },
    /// The same arbitrary state in every register.
    Fixed { state: DenseState },
    /// Register `r` holds `states[r mod len]`.
    PerRegister { states: Vec<DenseState> },
    /// A shared draw `λ ~ weights` made once per run selects a
    /// per-register pattern `strategies[λ]`.
    ClassicallyCorrelated { weights: Vec<f64>, strategies: Vec<Vec<DenseState>> },
}

impl ProverModel {
    pub fn kind(&self) -> &'static str {
        match self {
            ProverModel::Honest => "honest",
            ProverModel::IidDeviated { .. } => "iid_deviated",
            ProverModel::CoherentError { .. } => "coherent_error",
            ProverModel::Fixed { .. } => "fixed",
            ProverModel::PerRegister { .. } => "per_register",
            ProverModel::ClassicallyCorrelated { .. } => "classically_correlated",
        }
    }
}

#[derive(Clone, Debug)]
enum Plan {
    Cycle(Vec<usize>),
    Shared { picker: WeightedIndex<f64>, patterns: Vec<Vec<usize>> },
}

#[derive(Clone, Debug)]
pub struct Prover {
    kind: &'static str,
    n_qubits: usize,
    pool: Vec<Arc<DenseState>>,
    plan: Plan,
}

/// A prover with its shared randomness fixed for one run.
#[derive(Clone, Debug)]
pub struct BoundProver<'a> {
    prover: &'a Prover,
    pattern: &'a [usize],
    pub strategy: Option<usize>,
}

impl Prover {
    pub fn new(model: &ProverModel, ideal: &DenseState) -> Result<Self> {
        let n = ideal.n_qubits();
        let one = |s: DenseState| -> Result<(Vec<DenseState>, Plan)> { Ok((vec![s], Plan::Cycle(vec![0]))) };
        let (pool, plan) = match model {
            ProverModel::Honest => one(ideal.clone())?,
            ProverModel::IidDeviated { epsilon_prime, eta } => {
                if !(0.0..=1.0).contains(epsilon_prime) {
                    return Err(Error::invalid(format!("epsilon' must lie in [0, 1], got {epsilon_prime}")));
                }
                if eta.n_qubits() != n {
                    return Err(Error::WidthMismatch {
                        expected: n,
                        found: eta.n_qubits(),
                    });
                }
                one(ideal.mix_with(eta, *epsilon_prime)?)?
            }
            ProverModel::CoherentError { gates } => {
                let mut amps = ideal
                    .amplitudes()
                    .ok_or_else(|| Error::invalid("coherent errors need a pure ideal state"))?
                    .to_vec();
                for g in gates {
                    if let Some(&q) = g.qubits().iter().find(|&&q| q >= n) {
                        return Err(Error::invalid(format!("error gate acts on qubit {q}, register has {n}")));
                    }
                    apply_gate(n, g, &mut amps);
                }
                one(DenseState::pure_normalized(n, amps)?)?
            }
            ProverModel::Fixed { state } => one(state.clone())?,
            ProverModel::PerRegister { states } => {
                if states.is_empty() {
                    return Err(Error::invalid("per-register prover needs at least one state"));
                }
                (states.clone(), Plan::Cycle((0..states.len()).collect()))
            }
            ProverModel::ClassicallyCorrelated { weights, strategies } => {
                if weights.len() != strategies.len() || strategies.iter().any(Vec::is_empty) {
                    return Err(Error::invalid("classically correlated prover needs one non-empty pattern per weight"));
                }
                let picker = WeightedIndex::new(weights.iter().copied())
                    .map_err(|e| Error::invalid(format!("bad strategy weights: {e}")))?;
                let mut pool = Vec::new();
                let mut patterns = Vec::new();
                for s in strategies {
                    let start = pool.len();
                    pool.extend(s.iter().cloned());
                    patterns.push((start..pool.len()).collect());
                }
                (pool, Plan::Shared { picker, patterns })
            }
        };
        if let Some(s) = pool.iter().find(|s| s.n_qubits() != n) {
            return Err(Error::WidthMismatch {
                expected: n,
                found: s.n_qubits(),
            });
        }
        Ok(Prover {
            kind: model.kind(),
            n_qubits: n,
            pool: pool.into_iter().map(Arc::new).collect(),
            plan,
        })
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Distinct register states.
    pub fn pool(&self) -> &[Arc<DenseState>] {
        &self.pool
    }

    /// Fixes the shared randomness (if any) for one run.
    pub fn bind<R: Rng + ?Sized>(&self, rng: &mut R) -> BoundProver<'_> {
        match &self.plan {
            Plan::Cycle(p) => BoundProver {
                prover: self,
                pattern: p,
                strategy: None,
            },
            Plan::Shared { picker, patterns } => {
                let s = picker.sample(rng);
                BoundProver {
                    prover: self,
                    pattern: &patterns[s],
                    strategy: Some(s),
                }
            }
        }
    }
}

impl BoundProver<'_> {
    /// Pool index of register `r`.
    pub fn pool_index(&self, r: u64) -> usize {
        self.pattern[(r % self.pattern.len() as u64) as usize]
    }

    pub fn register(&self, r: u64) -> &DenseState {
        &self.prover.pool[self.pool_index(r)]
    }
}
