//! Expansion of a dense Hermitian operator in the `4^N` Pauli strings.

use num_complex::Complex64;

use crate::pauli::{PauliString};
use crate::state::{check_cap, hermiticity_defect, i_pow, Operator};
use crate::{Error, Result, DENSITY_CAP, DROP_THRESHOLD};

const HERMITIAN_TOL: f64 = 1e-8;

/// Returns every `c_σ = Tr[op σ] / 2^N` with `|c_σ| > DROP_THRESHOLD`, in
/// canonical label order.
pub fn decompose_in_pauli_basis(op: &Operator) -> Result<Vec<PauliString>> {
    let dim = op.nrows();
    if dim != op.ncols() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::invalid(format!("operator of shape {}x{} is not a qubit operator", op.nrows(), op.ncols())));
    }
    let n = dim.trailing_zeros() as usize;
    check_cap("Pauli decomposition", DENSITY_CAP, n)?;
    let defect = hermiticity_defect(op);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let scale = 1.0 / dim as f64;
    let mut out = Vec::new();
    // Enumerate in label order: per qubit I, X, Y, Z with qubit 0 slowest.
    for code in 0..(1usize << (2 * n)) {
        let (mut xm, mut zm) = (0u64, 0u64);
        for q in 0..n {
            let digit = (code >> (2 * (n - 1 - q))) & 3;
            let bit = 1u64 << (n - 1 - q);
            match digit {
                1 => xm |= bit,
                2 => {
                    xm |= bit;
                    zm |= bit
                }
                3 => zm |= bit,
                _ => {}
            }
        }
        let y_phase = i_pow((xm & zm).count_ones());
        // Tr[A σ] = Σ_b A_{b, b⊕x} phase(b)
        let tr: Complex64 = (0..dim)
            .map(|b| {
                let ph = if (b as u64 & zm).count_ones() % 2 == 1 { -y_phase } else { y_phase };
                op[(b, b ^ xm as usize)] * ph
            })
            .sum();
        let c = tr.re * scale;
        if c.abs() > DROP_THRESHOLD {
            out.push(PauliString::from_dense_masks(n, xm, zm, c));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{max_abs_diff, pauli_sum_matrix};

    fn labels(terms: &[PauliString]) -> Vec<(String, f64)> {
        terms.iter().map(|t| (t.label(), t.coeff())).collect()
    }

    #[test]
    fn identity_has_single_term() {
        let t = decompose_in_pauli_basis(&Operator::identity(8, 8)).unwrap();
        assert_eq!(labels(&t), vec![("III".to_string(), 1.0)]);
    }

    #[test]
    fn one_projector_is_half_i_minus_z() {
        let mut m = Operator::zeros(2, 2);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        let t = decompose_in_pauli_basis(&m).unwrap();
        assert_eq!(labels(&t), vec![("I".to_string(), 0.5), ("Z".to_string(), -0.5)]);
    }

    #[test]
    fn y_is_recovered() {
        let y = pauli_sum_matrix(2, &[PauliString::parse("YX", -0.25).unwrap()]).unwrap();
        let t = decompose_in_pauli_basis(&y).unwrap();
        assert_eq!(labels(&t), vec![("YX".to_string(), -0.25)]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Operator::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(decompose_in_pauli_basis(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_oversized() {
        let m = Operator::identity(512, 512);
        assert!(matches!(decompose_in_pauli_basis(&m), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn reconstruction_of_a_mixed_sum() {
        let terms = vec![
            PauliString::parse("XZ", 0.3).unwrap(),
            PauliString::parse("YY", -1.2).unwrap(),
            PauliString::parse("IZ", 0.7).unwrap(),
        ];
        let m = pauli_sum_matrix(2, &terms).unwrap();
        let back = decompose_in_pauli_basis(&m).unwrap();
        assert!(max_abs_diff(&m, &pauli_sum_matrix(2, &back).unwrap()) < 1e-12);
        assert_eq!(back.len(), 3);
    }
}
