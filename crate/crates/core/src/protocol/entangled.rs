//! Toy-size path for provers whose registers are entangled with each other.
//!
//! The engine keeps the joint pure state of all registers, measures the
//! tested registers one after another (collapsing the joint state on each
//! outcome), and reports the fidelity of the target register's reduced
//! state after all tests. Limited to [`ENTANGLED_CAP`] qubits in total and
//! single-threaded.

use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand::Rng;
use serde::Serialize;

use super::engine::{draw_layout, GroupResult};
use super::params::{ProtocolKind, ProtocolParams};
use super::threshold::ThresholdRule;
use crate::hypergraph::AdaptiveStabilizerForm;
use crate::kernels::{AdaptiveTest, SingleCopyTest};
use crate::measure::{rotate_vector, rotation};
use crate::pauli::Pauli;
use crate::rng::{stream, TAG_ENTANGLED};
use crate::state::{check_cap, qubit_bit, DenseState, Operator};
use crate::{Error, Result};

/// Largest total qubit count (all registers together).
pub const ENTANGLED_CAP: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct EntangledReport {
    pub accepted: bool,
    pub params: ProtocolParams,
    pub seed: u64,
    pub target_register_index: u64,
    /// `<ideal|ρ_tgt|ideal>` of the post-measurement reduced target state.
    pub target_fidelity: f64,
    pub per_group: Vec<GroupResult>,
}

/// Normalised `Σ_j w_j |s_j1> ⊗ … ⊗ |s_jT>` over product branches.
pub fn superposition_of_products(branches: &[(Complex64, Vec<&DenseState>)]) -> Result<(usize, Vec<Complex64>)> {
    let first = branches.first().ok_or_else(|| Error::invalid("need at least one branch"))?;
    let width = |b: &[&DenseState]| b.iter().map(|s| s.n_qubits()).sum::<usize>();
    let total = width(&first.1);
    check_cap("entangled joint state", ENTANGLED_CAP, total)?;
    let mut joint = vec![Complex64::new(0.0, 0.0); 1 << total];
    for (w, regs) in branches {
        if width(regs) != total {
            return Err(Error::invalid("branches must cover the same registers"));
        }
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        for s in regs {
            let a = s.amplitudes().ok_or_else(|| Error::invalid("branch registers must be pure"))?;
            prod = prod.iter().flat_map(|x| a.iter().map(move |y| x * y)).collect();
        }
        for (j, p) in joint.iter_mut().zip(prod) {
            *j += w * p;
        }
    }
    let norm: f64 = joint.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::invalid("branches cancel"));
    }
    joint.iter_mut().for_each(|x| *x /= norm);
    Ok((total, joint))
}

struct Joint {
    total: usize,
    n: usize,
    amps: Vec<Complex64>,
}

impl Joint {
    fn qubit(&self, reg: usize, q: usize) -> usize {
        reg * self.n + q
    }

    /// Measures register `reg` in `bases`, collapsing the joint state;
    /// returns the local outcome bits (register qubit 0 most significant).
    fn measure<R: Rng + ?Sized>(&mut self, reg: usize, bases: &[Pauli], rng: &mut R) -> u64 {
        let n = self.n;
        for (q, &p) in bases.iter().enumerate() {
            if let Some(u) = rotation(p) {
                let jq = self.qubit(reg, q);
                rotate_vector(&mut self.amps, self.total, jq, &u);
            }
        }
        let measured: Vec<(usize, u64)> = (0..n)
            .filter(|&q| bases[q] != Pauli::I)
            .map(|q| (q, qubit_bit(self.total, self.qubit(reg, q))))
            .collect();
        let local = |b: usize| -> u64 {
            measured
                .iter()
                .fold(0u64, |acc, &(q, bit)| if b as u64 & bit != 0 { acc | qubit_bit(n, q) } else { acc })
        };
        let mut probs = vec![0.0; 1 << n];
        for (b, a) in self.amps.iter().enumerate() {
            probs[local(b) as usize] += a.norm_sqr();
        }
        let u: f64 = Uniform::new(0.0, probs.iter().sum::<f64>()).expect("positive mass").sample(rng);
        let mut acc = 0.0;
        let mut outcome = probs.len() - 1;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                outcome = i;
                break;
            }
        }
        let norm = probs[outcome].sqrt();
        for (b, a) in self.amps.iter_mut().enumerate() {
            if local(b) as usize == outcome {
                *a /= norm;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        outcome as u64
    }

    /// Reduced density matrix of register `reg`.
    fn reduced(&self, reg: usize) -> Operator {
        let n = self.n;
        let dim = 1usize << n;
        let shift = self.total - n * (reg + 1);
        let mask = (dim - 1) << shift;
        let mut rho = Operator::zeros(dim, dim);
        for (b, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let i = (b & mask) >> shift;
            for j in 0..dim {
                let c = (b & !mask) | (j << shift);
                rho[(i, j)] += a * self.amps[c].conj();
            }
        }
        rho
    }
}

/// Hypergraph protocol against a joint state of all `N·k·N + m + 1`
/// registers (register `r` occupies joint qubits `rN .. rN+N−1`).
pub fn run_entangled_hypergraph(
    ideal: &DenseState,
    forms: &[AdaptiveStabilizerForm],
    joint_state: &[Complex64],
    params: &ProtocolParams,
    seed: u64,
) -> Result<EntangledReport> {
    if params.protocol != ProtocolKind::Hypergraph || params.n != ideal.n_qubits() || forms.len() != params.n {
        return Err(Error::invalid("parameters, ideal state and forms disagree"));
    }
    let n = params.n;
    let regs = params.registers()? as usize;
    let total = regs * n;
    check_cap("entangled joint state", ENTANGLED_CAP, total)?;
    if joint_state.len() != 1 << total {
        return Err(Error::WidthMismatch {
            expected: total,
            found: joint_state.len().trailing_zeros() as usize,
        });
    }
    let ideal_amps = ideal.amplitudes().ok_or_else(|| Error::invalid("the ideal state must be pure"))?;
    let tests: Vec<AdaptiveTest> = forms.iter().map(AdaptiveTest::new).collect();
    let rule = ThresholdRule::hypergraph(params.epsilon)?;
    let (target, tested) = draw_layout(params, seed)?;
    let mut joint = Joint {
        total,
        n,
        amps: joint_state.to_vec(),
    };
    let mut rng = stream(seed, &[TAG_ENTANGLED]);
    let k = params.k as usize;
    let mut per_group = Vec::with_capacity(n);
    for (g, test) in tests.iter().enumerate() {
        let mut passes = 0u64;
        for &reg in &tested[g * k..(g + 1) * k] {
            let slot = test.choose(&mut rng);
            let bits = joint.measure(reg as usize, test.bases(slot), &mut rng);
            passes += test.judge(slot, bits) as u64;
        }
        per_group.push(GroupResult {
            group: g,
            passes,
            k: params.k,
            passed: rule.passes(passes, params.k),
            threshold: rule.clone(),
            r: None,
        });
    }
    let rho = joint.reduced(target as usize);
    let tgt = DenseState::mixed(n, rho)?;
    Ok(EntangledReport {
        accepted: per_group.iter().all(|g| g.passed),
        params: params.clone(),
        seed,
        target_register_index: target,
        target_fidelity: tgt.fidelity_with_pure(ideal_amps)?,
        per_group,
    })
}
