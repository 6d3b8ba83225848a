use serde::Serialize;

use crate::measure::born_distribution;
use crate::pauli::Pauli;
use crate::state::{check_width, hermitian_eigenvalues, DenseState};
use crate::{Error, Result};

/// Two distributions over `{0,1}^N`, indexed by dense bitstrings.
#[derive(Clone, Debug, Serialize)]
pub struct DistributionPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

const SUM_TOL: f64 = 1e-9;

impl DistributionPair {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() || !p.len().is_power_of_two() {
            return Err(Error::invalid("distributions must have equal power-of-two length"));
        }
        for (name, d) in [("p", &p), ("q", &q)] {
            let s: f64 = d.iter().sum();
            if (s - 1.0).abs() > SUM_TOL || d.iter().any(|&x| x < -SUM_TOL) {
                return Err(Error::invalid(format!("{name} is not a probability vector (sum {s})")));
            }
        }
        Ok(DistributionPair { p, q })
    }
}

/// `p_z = <z| H^{⊗N} ρ H^{⊗N} |z>`.
pub fn x_basis_distribution(state: &DenseState) -> Result<Vec<f64>> {
    born_distribution(state, &vec![Pauli::X; state.n_qubits()])
}

/// `Σ_z |p_z − q_z|`.
pub fn l1_distance(d: &DistributionPair) -> f64 {
    d.p.iter().zip(&d.q).map(|(a, b)| (a - b).abs()).sum()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FidelityBounds {
    /// `<ideal|ρ|ideal>`.
    pub fidelity: f64,
    /// `½‖ρ − |ideal><ideal|‖_1`.
    pub trace_distance: f64,
    /// `√(1 − F)`.
    pub sqrt_infidelity: f64,
    /// `Σ_x |Tr[M_x ρ] − <ideal|M_x|ideal>|` for the X-basis measurement.
    pub x_basis_l1: f64,
    /// `l1 ≤ 2·trace distance ≤ 2√(1−F)`, upper end.
    pub l1_bound: f64,
    pub trace_distance_within_bound: bool,
    pub povm_within_trace_distance: bool,
}

/// Slack for the numerical inequality checks.
const INEQ_SLACK: f64 = 1e-9;

pub fn trace_distance_fidelity_bounds(rho: &DenseState, ideal: &DenseState) -> Result<FidelityBounds> {
    check_width(ideal.n_qubits(), rho.n_qubits())?;
    let amps = ideal
        .amplitudes()
        .ok_or_else(|| Error::invalid("the ideal state must be pure"))?;
    let fidelity = rho.fidelity_with_pure(amps)?;
    let diff = rho.density_matrix()? - ideal.density_matrix()?;
    let trace_distance = 0.5 * hermitian_eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>();
    let sqrt_infidelity = (1.0 - fidelity).max(0.0).sqrt();
    let x_basis_l1 = l1_distance(&DistributionPair {
        p: x_basis_distribution(ideal)?,
        q: x_basis_distribution(rho)?,
    });
    Ok(FidelityBounds {
        fidelity,
        trace_distance,
        sqrt_infidelity,
        x_basis_l1,
        l1_bound: 2.0 * sqrt_infidelity,
        trace_distance_within_bound: trace_distance <= sqrt_infidelity + INEQ_SLACK,
        povm_within_trace_distance: 0.5 * x_basis_l1 <= trace_distance + INEQ_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::HypergraphSpec;

    #[test]
    fn plus_state_maps_to_zero_string() {
        let p = x_basis_distribution(&DenseState::plus(3).unwrap()).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1..].iter().all(|&x| x < 1e-12));
        let u = x_basis_distribution(&DenseState::maximally_mixed(2).unwrap()).unwrap();
        assert!(u.iter().all(|&x| (x - 0.25).abs() < 1e-12));
    }

    #[test]
    fn worked_example_distribution() {
        // H^{⊗3}|G>: amplitude of z is (1/8)(Σ_b (−1)^{b·z} − 2(−1)^{|z|}),
        // so p_0 = (6/8)² and every other p_z = (2/8)².
        let g = HypergraphSpec::new(3, vec![vec![0, 1, 2]]).unwrap();
        let p = x_basis_distribution(&g.build_state().unwrap()).unwrap();
        assert!((p[0] - 0.5625).abs() < 1e-12);
        assert!(p[1..].iter().all(|&x| (x - 0.0625).abs() < 1e-12));
    }

    #[test]
    fn extremes() {
        assert_eq!(l1_distance(&DistributionPair::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap()), 2.0);
        assert!(DistributionPair::new(vec![0.5, 0.6], vec![0.5, 0.5]).is_err());
        let a = DenseState::basis(1, 0).unwrap();
        let b = DenseState::basis(1, 1).unwrap();
        let f = trace_distance_fidelity_bounds(&b, &a).unwrap();
        assert!(f.fidelity.abs() < 1e-15 && (f.trace_distance - 1.0).abs() < 1e-12 && f.l1_bound == 2.0);
        let same = trace_distance_fidelity_bounds(&a, &a).unwrap();
        assert!((same.fidelity - 1.0).abs() < 1e-15 && same.trace_distance < 1e-12);
    }
}
