//! Random instances for tests, benchmarks and the CLI.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::{CircuitSpec, Gate};
use crate::pauli::{Pauli, PauliString};
use crate::state::{check_cap, DenseState, Operator};
use crate::{Error, Result, DENSITY_CAP};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state (normalised complex Gaussian vector).
pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseState> {
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    DenseState::pure_normalized(n, amps)
}

/// `G G^† / Tr[G G^†]` with `G` a `2^N × rank` complex Gaussian matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DenseState> {
    check_cap("random density matrix", DENSITY_CAP, n)?;
    if rank == 0 {
        return Err(Error::invalid("rank must be positive"));
    }
    let dim = 1usize << n;
    let g = Operator::from_fn(dim, rank, |_, _| gaussian(rng));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace();
    rho /= tr;
    // enforce exact Hermiticity against rounding
    let herm = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DenseState::mixed(n, herm)
}

pub fn random_pauli_string<R: Rng + ?Sized>(n: usize, coeff: f64, rng: &mut R) -> PauliString {
    let ps: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
    PauliString::from_paulis(&ps, coeff)
}

/// `terms` random strings with coefficients uniform in `[-1, 1]`.
pub fn random_pauli_sum<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> Vec<PauliString> {
    (0..terms)
        .map(|_| {
            let c = rng.random_range(-1.0..=1.0);
            random_pauli_string(n, c, rng)
        })
        .collect()
}

/// Random circuit over the full gate set (multi-qubit gates need enough
/// qubits and are skipped otherwise).
pub fn random_circuit<R: Rng + ?Sized>(n: usize, gates: usize, rng: &mut R) -> Result<CircuitSpec> {
    let mut out = Vec::with_capacity(gates);
    while out.len() < gates {
        let q = rng.random_range(0..n);
        let pick = rng.random_range(0..11);
        let distinct = |rng: &mut R, m: usize| -> Option<Vec<usize>> {
            (n >= m).then(|| rand::seq::index::sample(rng, n, m).into_vec())
        };
        let g = match pick {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Sdg(q),
            3 => Gate::X(q),
            4 => Gate::Y(q),
            5 => Gate::Z(q),
            6 => Gate::T(q),
            7 => Gate::Rz(q, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)),
            8 => match distinct(rng, 2) {
                Some(v) => Gate::Cz(v[0], v[1]),
                None => continue,
            },
            9 => match distinct(rng, 2) {
                Some(v) => Gate::Cnot(v[0], v[1]),
                None => continue,
            },
            _ => match distinct(rng, 3) {
                Some(v) => Gate::Ccz(v[0], v[1], v[2]),
                None => continue,
            },
        };
        out.push(g);
    }
    CircuitSpec::new(n, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn random_states_are_valid() {
        let mut rng = stream(2, &[]);
        for n in 1..=4 {
            let rho = random_density_matrix(n, 3, &mut rng).unwrap();
            assert!(!rho.is_pure());
            let psi = random_pure_state(n, &mut rng).unwrap();
            assert!(psi.is_pure());
        }
        let c = random_circuit(1, 20, &mut rng).unwrap();
        assert_eq!(c.gates().len(), 20);
    }
}
