//! Destructive single-qubit Pauli measurements on every qubit of a register.
//!
//! Each measured qubit is rotated into the computational basis (`X` by `H`,
//! `Y` by `H S^†`) and one joint bitstring is drawn from the Born
//! distribution. Qubits with basis `I` are not measured and report `+1`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::Pauli;
use crate::state::{check_width, qubit_bit, DenseState, Operator, Representation};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// `+1` or `-1` per qubit.
    pub outcomes: Vec<i8>,
    pub bases: Vec<Pauli>,
}

impl MeasurementRecord {
    /// Builds a record from a dense outcome index (bit set means `-1`).
    pub fn from_bits(bases: &[Pauli], bits: u64) -> Self {
        let n = bases.len();
        let outcomes = (0..n)
            .map(|q| {
                if bases[q] != Pauli::I && bits & qubit_bit(n, q) != 0 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        MeasurementRecord {
            outcomes,
            bases: bases.to_vec(),
        }
    }

    /// Dense outcome index with a set bit for every `-1`.
    pub fn bits(&self) -> u64 {
        let n = self.outcomes.len();
        (0..n)
            .filter(|&q| self.outcomes[q] == -1)
            .fold(0, |acc, q| acc | qubit_bit(n, q))
    }

    /// `Π_j m_j`.
    pub fn product(&self) -> i8 {
        self.outcomes.iter().product()
    }
}

pub(crate) fn rotation(p: Pauli) -> Option<[[Complex64; 2]; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    match p {
        Pauli::I | Pauli::Z => None,
        Pauli::X => Some([[r(h), r(h)], [r(h), r(-h)]]),
        // H S†
        Pauli::Y => Some([[r(h), Complex64::new(0.0, -h)], [r(h), Complex64::new(0.0, h)]]),
    }
}

pub(crate) fn rotate_vector(amps: &mut [Complex64], n: usize, q: usize, u: &[[Complex64; 2]; 2]) {
    let bit = qubit_bit(n, q) as usize;
    for b in 0..amps.len() {
        if b & bit == 0 {
            let (a0, a1) = (amps[b], amps[b | bit]);
            amps[b] = u[0][0] * a0 + u[0][1] * a1;
            amps[b | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

fn rotate_density(m: &mut Operator, n: usize, q: usize, u: &[[Complex64; 2]; 2]) {
    let bit = qubit_bit(n, q) as usize;
    let dim = m.nrows();
    // rows: U ρ
    for c in 0..dim {
        for b in 0..dim {
            if b & bit == 0 {
                let (a0, a1) = (m[(b, c)], m[(b | bit, c)]);
                m[(b, c)] = u[0][0] * a0 + u[0][1] * a1;
                m[(b | bit, c)] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }
    // columns: (U ρ) U†
    for r in 0..dim {
        for b in 0..dim {
            if b & bit == 0 {
                let (a0, a1) = (m[(r, b)], m[(r, b | bit)]);
                m[(r, b)] = a0 * u[0][0].conj() + a1 * u[0][1].conj();
                m[(r, b | bit)] = a0 * u[1][0].conj() + a1 * u[1][1].conj();
            }
        }
    }
}

/// Exact outcome distribution over dense indices after rotating each
/// measured qubit; bits of unmeasured qubits are marginalised to zero.
pub fn born_distribution(state: &DenseState, bases: &[Pauli]) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    check_width(n, bases.len())?;
    let probs = match state.representation() {
        Representation::Pure(a) => {
            let mut v = a.clone();
            for (q, &p) in bases.iter().enumerate() {
                if let Some(u) = rotation(p) {
                    rotate_vector(&mut v, n, q, &u);
                }
            }
            v.iter().map(|x| x.norm_sqr()).collect::<Vec<_>>()
        }
        Representation::Mixed(m) => {
            let mut m = m.clone();
            for (q, &p) in bases.iter().enumerate() {
                if let Some(u) = rotation(p) {
                    rotate_density(&mut m, n, q, &u);
                }
            }
            (0..m.nrows()).map(|i| m[(i, i)].re.max(0.0)).collect()
        }
    };
    let unmeasured = unmeasured_mask(bases) as usize;
    if unmeasured == 0 {
        return Ok(probs);
    }
    let mut out = vec![0.0; probs.len()];
    for (b, p) in probs.into_iter().enumerate() {
        out[b & !unmeasured] += p;
    }
    Ok(out)
}

fn unmeasured_mask(bases: &[Pauli]) -> u64 {
    let n = bases.len();
    (0..n)
        .filter(|&q| bases[q] == Pauli::I)
        .fold(0, |acc, q| acc | qubit_bit(n, q))
}

/// Precomputed Born sampler for one basis pattern.
#[derive(Clone, Debug)]
pub struct BasisSampler {
    bases: Vec<Pauli>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl BasisSampler {
    pub fn new(state: &DenseState, bases: &[Pauli]) -> Result<Self> {
        let probs = born_distribution(state, bases)?;
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(BasisSampler {
            bases: bases.to_vec(),
            probs,
            cdf,
        })
    }

    pub fn bases(&self) -> &[Pauli] {
        &self.bases
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Draws a dense outcome index.
    #[inline]
    pub fn sample_bits<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cdf.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1) as u64
    }

    pub fn probability_of_bits(&self, bits: u64) -> f64 {
        self.probs[bits as usize]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (MeasurementRecord, f64) {
        let bits = self.sample_bits(rng);
        (MeasurementRecord::from_bits(&self.bases, bits), self.probability_of_bits(bits))
    }
}

/// Measures every qubit of `state` in `bases` once, returning the record and
/// the Born probability of that record.
pub fn measure_in_bases<R: Rng + ?Sized>(state: &DenseState, bases: &[Pauli], rng: &mut R) -> Result<(MeasurementRecord, f64)> {
    Ok(BasisSampler::new(state, bases)?.sample(rng))
}

/// Total-variation distance between empirical counts and exact probabilities.
pub fn total_variation(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    0.5 * counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 / total as f64 - p).abs())
        .sum::<f64>()
}
