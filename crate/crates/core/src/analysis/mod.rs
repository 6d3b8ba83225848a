//! Post-processing: output distributions and fidelity bounds, the IQP
//! sampling margin, binomial/Hoeffding tails, and robustness sweeps.

pub mod distribution;
pub mod margin;
pub mod robustness;
pub mod tails;

pub use distribution::{l1_distance, trace_distance_fidelity_bounds, x_basis_distribution, DistributionPair, FidelityBounds};
pub use margin::{minimal_k_for_margin, supremacy_margin, MarginReport, SUPREMACY_THRESHOLD};
pub use robustness::{robustness_sweep, RobustnessCurve, RobustnessPoint, SweepTarget};
pub use tails::{binomial_pmf_range, binomial_tail_at_least, binomial_tail_at_most, group_pass_probability, hoeffding_bound, predicted_acceptance};

/// How a reported number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputationMode {
    Exact,
    MonteCarlo,
    Bound,
}
