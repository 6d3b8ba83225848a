//! Loading protocol targets from their JSON files.

use std::path::Path;

use pauliverify::circuit::{all_stabilizers, CircuitSpec, StabilizerDecomposition};
use pauliverify::hamiltonian::{exact_diagonalize, rescale, HamiltonianSpec, RescaledHamiltonian, Spectrum};
use pauliverify::hypergraph::{AdaptiveStabilizerForm, HypergraphSpec};
use pauliverify::io::{load_json, CircuitFile, HamiltonianFile, HypergraphFile};
use pauliverify::protocol::ProtocolKind;
use pauliverify::state::DenseState;
use pauliverify::{Error, Result, DENSITY_CAP};

// One per process; boxing the large variant buys nothing.
#[allow(clippy::large_enum_variant)]
pub enum Target {
    Ground {
        hamiltonian: HamiltonianSpec,
        rescaled: RescaledHamiltonian,
        /// Present when the register width allows exact diagonalisation.
        spectrum: Option<Spectrum>,
        ground_state: Option<DenseState>,
    },
    Circuit {
        circuit: CircuitSpec,
        decomps: Vec<StabilizerDecomposition>,
        ideal: DenseState,
    },
    Hypergraph {
        hypergraph: HypergraphSpec,
        ideal: DenseState,
        forms: Vec<AdaptiveStabilizerForm>,
    },
}

impl Target {
    pub fn load(kind: ProtocolKind, path: &Path) -> Result<Self> {
        match kind {
            ProtocolKind::Ground => {
                let hamiltonian = load_json::<HamiltonianFile>(path)?.into_spec()?;
                let rescaled = rescale(&hamiltonian)?;
                let spectrum = if hamiltonian.n_qubits() <= DENSITY_CAP {
                    Some(exact_diagonalize(&hamiltonian)?)
                } else {
                    None
                };
                let ground_state = spectrum
                    .as_ref()
                    .map(|s| DenseState::pure(hamiltonian.n_qubits(), s.ground_state.clone()))
                    .transpose()?;
                Ok(Target::Ground {
                    hamiltonian,
                    rescaled,
                    spectrum,
                    ground_state,
                })
            }
            ProtocolKind::Circuit => {
                let circuit = load_json::<CircuitFile>(path)?.into_spec()?;
                let decomps = all_stabilizers(&circuit)?;
                let ideal = circuit.prepare_state()?;
                Ok(Target::Circuit { circuit, decomps, ideal })
            }
            ProtocolKind::Hypergraph => {
                let hypergraph = load_json::<HypergraphFile>(path)?.into_spec()?;
                let ideal = hypergraph.build_state()?;
                let forms = hypergraph.adaptive_forms()?;
                Ok(Target::Hypergraph { hypergraph, ideal, forms })
            }
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            Target::Ground { .. } => ProtocolKind::Ground,
            Target::Circuit { .. } => ProtocolKind::Circuit,
            Target::Hypergraph { .. } => ProtocolKind::Hypergraph,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Target::Ground { hamiltonian, .. } => hamiltonian.n_qubits(),
            Target::Circuit { circuit, .. } => circuit.n_qubits(),
            Target::Hypergraph { hypergraph, .. } => hypergraph.n_vertices(),
        }
    }

    /// The state an honest prover sends.
    pub fn ideal(&self) -> Result<&DenseState> {
        match self {
            Target::Ground { ground_state, .. } => ground_state.as_ref().ok_or(Error::CapExceeded {
                what: "ground-state preparation by exact diagonalisation",
                cap: DENSITY_CAP,
                requested: self.n_qubits(),
            }),
            Target::Circuit { ideal, .. } | Target::Hypergraph { ideal, .. } => Ok(ideal),
        }
    }

    /// `R` for the ground protocol, `max_i R_i` for the circuit protocol.
    pub fn r(&self) -> Option<f64> {
        match self {
            Target::Ground { rescaled, .. } => Some(rescaled.r()),
            Target::Circuit { decomps, .. } => Some(decomps.iter().map(|d| d.r()).fold(0.0, f64::max)),
            Target::Hypergraph { .. } => None,
        }
    }
}
