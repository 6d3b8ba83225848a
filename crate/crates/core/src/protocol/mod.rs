//! The three verification protocols.

pub mod engine;
pub mod entangled;
pub mod params;
pub mod prover;
pub mod threshold;

pub use engine::{run_circuit_protocol, run_ground_protocol, run_hypergraph_protocol, run_many, RunOptions, RunSummary, VerdictReport};
pub use params::{paper_params, Mode, PaperSchedule, ProtocolKind, ProtocolParams};
pub use prover::{Prover, ProverModel};
pub use threshold::ThresholdRule;
