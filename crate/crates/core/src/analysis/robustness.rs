//! Acceptance of the i.i.d.-deviated prover `(1 − ε′)|ideal><ideal| + ε′η`
//! as a function of `ε′`.
//!
//! For the hypergraph protocol the curve is compared with the bound
//! `1 − N e^{−2(ε′−ε)²k}`. For the other two protocols the analogous
//! Hoeffding bound on the per-group margin is reported and labelled
//! extrapolated.

use serde::Serialize;

use super::tails::{hoeffding_bound, predicted_acceptance};
use crate::circuit::StabilizerDecomposition;
use crate::hamiltonian::RescaledHamiltonian;
use crate::hypergraph::HypergraphSpec;
use crate::kernels::{AdaptiveTest, PauliTermTest, SingleCopyTest};
use crate::protocol::engine::{run_circuit_protocol, run_ground_protocol, run_hypergraph_protocol, run_many, RunOptions};
use crate::protocol::{ProtocolKind, ProtocolParams, Prover, ProverModel, ThresholdRule};
use crate::state::{DenseState, Operator};
use crate::{Error, Result};

pub enum SweepTarget<'a> {
    Ground {
        rh: &'a RescaledHamiltonian,
        ground_state: &'a DenseState,
        projector: Option<&'a Operator>,
    },
    Circuit {
        decomps: &'a [StabilizerDecomposition],
        ideal: &'a DenseState,
    },
    Hypergraph {
        hypergraph: &'a HypergraphSpec,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundLabel {
    /// Stated for the hypergraph protocol.
    Paper,
    /// Same argument carried over to the ground or circuit protocol.
    Extrapolated,
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustnessPoint {
    pub epsilon_prime: f64,
    pub runs: u64,
    pub accepted: u64,
    pub measured_acceptance: f64,
    /// Binomial standard error of the measured acceptance.
    pub monte_carlo_sigma: f64,
    /// Exact acceptance for i.i.d. registers from the closed-form `p_pass`.
    pub predicted_acceptance: f64,
    pub per_group_ppass: Vec<f64>,
    pub bound: f64,
    pub bound_label: BoundLabel,
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustnessCurve {
    pub protocol: ProtocolKind,
    pub params: ProtocolParams,
    pub seed: u64,
    pub points: Vec<RobustnessPoint>,
}

pub fn robustness_sweep(target: &SweepTarget<'_>, eta: &DenseState, epsilon_primes: &[f64], params: &ProtocolParams, runs: u64, seed: u64) -> Result<RobustnessCurve> {
    let (kind, ideal, forms, hyper_ideal) = match target {
        SweepTarget::Ground { ground_state, .. } => (ProtocolKind::Ground, (*ground_state).clone(), None, None),
        SweepTarget::Circuit { ideal, .. } => (ProtocolKind::Circuit, (*ideal).clone(), None, None),
        SweepTarget::Hypergraph { hypergraph } => {
            let s = hypergraph.build_state()?;
            (ProtocolKind::Hypergraph, s.clone(), Some(hypergraph.adaptive_forms()?), Some(s))
        }
    };
    if params.protocol != kind {
        return Err(Error::invalid("sweep target and parameters are for different protocols"));
    }
    let (k, eps, n) = (params.k, params.epsilon, params.n);
    let mut points = Vec::with_capacity(epsilon_primes.len());
    for (idx, &ep) in epsilon_primes.iter().enumerate() {
        let model = ProverModel::IidDeviated {
            epsilon_prime: ep,
            eta: eta.clone(),
        };
        let prover = Prover::new(&model, &ideal)?;
        let rho = prover.pool()[0].clone();
        let point_seed = crate::rng::mix(seed, &[idx as u64]);
        let opts = RunOptions::default();
        let (groups, bound, label): (Vec<(ThresholdRule, f64)>, f64, BoundLabel) = match target {
            SweepTarget::Ground { rh, .. } => {
                let p = PauliTermTest::energy(rh)?.exact_ppass(&rho)?;
                let e_eta = PauliTermTest::energy(rh)?.operator_expectation(eta)?;
                let t = (eps - ep * e_eta) / (2.0 * rh.r());
                let bound = if t > 0.0 { 1.0 - hoeffding_bound(k, t) } else { f64::NEG_INFINITY };
                (vec![(ThresholdRule::ground(eps, rh.r())?, p)], bound, BoundLabel::Extrapolated)
            }
            SweepTarget::Circuit { decomps, .. } => {
                let mut groups = Vec::new();
                let mut fail = 0.0;
                let mut meaningful = true;
                for d in decomps.iter() {
                    let test = PauliTermTest::stabilizer(d)?;
                    let p = test.exact_ppass(&rho)?;
                    let t = (eps - ep * (1.0 - test.operator_expectation(eta)?)) / (2.0 * d.r());
                    if t > 0.0 {
                        fail += hoeffding_bound(k, t);
                    } else {
                        meaningful = false;
                    }
                    groups.push((ThresholdRule::circuit(eps, d.r())?, p));
                }
                let bound = if meaningful { 1.0 - fail } else { f64::NEG_INFINITY };
                (groups, bound, BoundLabel::Extrapolated)
            }
            SweepTarget::Hypergraph { .. } => {
                let rule = ThresholdRule::hypergraph(eps)?;
                let groups = forms
                    .as_ref()
                    .expect("hypergraph forms")
                    .iter()
                    .map(|f| Ok((rule.clone(), AdaptiveTest::new(f).exact_ppass(&rho)?)))
                    .collect::<Result<Vec<_>>>()?;
                let bound = 1.0 - n as f64 * hoeffding_bound(k, ep - eps);
                (groups, bound, BoundLabel::Paper)
            }
        };
        let summary = run_many(runs, point_seed, |s| match target {
            SweepTarget::Ground { rh, projector, .. } => run_ground_protocol(rh, *projector, &prover, params, s, opts),
            SweepTarget::Circuit { decomps, ideal } => run_circuit_protocol(decomps, ideal, &prover, params, s, opts),
            SweepTarget::Hypergraph { .. } => run_hypergraph_protocol(
                hyper_ideal.as_ref().expect("hypergraph state"),
                forms.as_ref().expect("hypergraph forms"),
                &prover,
                params,
                s,
                opts,
            ),
        })?;
        let rate = summary.acceptance_rate;
        points.push(RobustnessPoint {
            epsilon_prime: ep,
            runs,
            accepted: summary.accepted,
            measured_acceptance: rate,
            monte_carlo_sigma: (rate * (1.0 - rate) / runs.max(1) as f64).sqrt(),
            predicted_acceptance: predicted_acceptance(&groups, k),
            per_group_ppass: groups.iter().map(|g| g.1).collect(),
            bound,
            bound_label: label,
        });
    }
    Ok(RobustnessCurve {
        protocol: kind,
        params: params.clone(),
        seed,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let g = HypergraphSpec::new(3, vec![vec![0, 1, 2], vec![0, 2]]).unwrap();
        let eta = DenseState::maximally_mixed(3).unwrap();
        let params = ProtocolParams::desk(ProtocolKind::Hypergraph, 3, 100, 10, 0.05).unwrap();
        let c = robustness_sweep(&SweepTarget::Hypergraph { hypergraph: &g }, &eta, &[0.0, 0.05], &params, 20, 1).unwrap();
        assert_eq!(c.points[0].accepted, 20);
        assert_eq!(c.points[0].predicted_acceptance, 1.0);
        // ε′ = ε: the bound degenerates to 1 − N.
        assert!((c.points[1].bound - (1.0 - 3.0)).abs() < 1e-12);
        for (p, want) in c.points[1].per_group_ppass.iter().zip([0.975; 3]) {
            assert!((p - want).abs() < 1e-12);
        }
    }
}
