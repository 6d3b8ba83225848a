//! JSON file formats.
//!
//! * Hamiltonian: `{"n_qubits", "terms": [{"pauli", "coeff"}], "ground_energy"?, "gap"?}`
//! * Hypergraph: `{"n_vertices", "edges": [[v, ...], ...]}`
//! * Circuit: `{"n_qubits", "gates": [{"name", "qubits", "angle"?}]}`
//! * Run config: `{"protocol", "target", "params", "prover", "seed"?, "runs"?}`
//!
//! Pauli labels put qubit 0 leftmost.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitSpec, Gate, GateRecord};
use crate::hamiltonian::HamiltonianSpec;
use crate::hypergraph::HypergraphSpec;
use crate::pauli::PauliString;
use crate::protocol::prover::ProverModel;
use crate::random::{random_density_matrix, random_pure_state};
use crate::rng::stream;
use crate::state::{apply_pauli, DenseState, Operator};
use crate::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub pauli: String,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub n_qubits: usize,
    pub terms: Vec<TermRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl HamiltonianFile {
    pub fn into_spec(self) -> Result<HamiltonianSpec> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.pauli.chars().count() != self.n_qubits {
                    return Err(Error::WidthMismatch {
                        expected: self.n_qubits,
                        found: t.pauli.chars().count(),
                    });
                }
                PauliString::parse(&t.pauli, t.coeff)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut h = HamiltonianSpec::new(self.n_qubits, terms)?;
        if let Some(e0) = self.ground_energy {
            h = h.with_ground_energy(e0);
        }
        if let Some(d) = self.gap {
            h = h.with_gap(d)?;
        }
        Ok(h)
    }

    pub fn from_spec(h: &HamiltonianSpec) -> Self {
        HamiltonianFile {
            n_qubits: h.n_qubits(),
            terms: h
                .terms()
                .iter()
                .map(|t| TermRecord {
                    pauli: t.label(),
                    coeff: t.coeff(),
                })
                .collect(),
            ground_energy: h.ground_energy(),
            gap: h.gap_lower_bound(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphFile {
    pub n_vertices: usize,
    pub edges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_edge_size: Option<usize>,
}

impl HypergraphFile {
    pub fn into_spec(self) -> Result<HypergraphSpec> {
        match self.max_edge_size {
            Some(c) => HypergraphSpec::with_max_edge_size(self.n_vertices, self.edges, c),
            None => HypergraphSpec::new(self.n_vertices, self.edges),
        }
    }

    pub fn from_spec(g: &HypergraphSpec) -> Self {
        HypergraphFile {
            n_vertices: g.n_vertices(),
            edges: g.edges().to_vec(),
            max_edge_size: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub n_qubits: usize,
    pub gates: Vec<GateRecord>,
}

impl CircuitFile {
    pub fn into_spec(self) -> Result<CircuitSpec> {
        let gates = gates_from_records(&self.gates)?;
        CircuitSpec::new(self.n_qubits, gates)
    }

    pub fn from_spec(c: &CircuitSpec) -> Self {
        CircuitFile {
            n_qubits: c.n_qubits(),
            gates: c.gates().iter().map(GateRecord::from).collect(),
        }
    }
}

pub fn gates_from_records(records: &[GateRecord]) -> Result<Vec<Gate>> {
    records.iter().map(|g| Gate::from_parts(&g.name, &g.qubits, g.angle)).collect()
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    parse_json(&read_text(path)?)
}

/// A register state described relative to the protocol's ideal state.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Ideal,
    Basis { index: usize },
    Plus,
    MaximallyMixed,
    /// Amplitudes as `[re, im]` pairs; normalised on load.
    Amplitudes { amplitudes: Vec<[f64; 2]> },
    /// Density matrix as nested rows of `[re, im]` pairs.
    Density { rows: Vec<Vec<[f64; 2]>> },
    /// A Pauli string applied to the ideal state (e.g. `"ZIII"`).
    PauliOnIdeal { pauli: String },
    /// `(1 − weight) a + weight b`.
    Mixture { a: Box<StateSpec>, b: Box<StateSpec>, weight: f64 },
    RandomPure { seed: u64 },
    RandomMixed { seed: u64, rank: usize },
}

impl StateSpec {
    pub fn resolve(&self, ideal: &DenseState) -> Result<DenseState> {
        let n = ideal.n_qubits();
        match self {
            StateSpec::Ideal => Ok(ideal.clone()),
            StateSpec::Basis { index } => DenseState::basis(n, *index),
            StateSpec::Plus => DenseState::plus(n),
            StateSpec::MaximallyMixed => DenseState::maximally_mixed(n),
            StateSpec::Amplitudes { amplitudes } => {
                DenseState::pure_normalized(n, amplitudes.iter().map(|[r, i]| Complex64::new(*r, *i)).collect())
            }
            StateSpec::Density { rows } => {
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidState("density matrix must be square".into()));
                }
                let m = Operator::from_fn(dim, dim, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1]));
                DenseState::mixed(n, m)
            }
            StateSpec::PauliOnIdeal { pauli } => apply_pauli(ideal, &PauliString::parse(pauli, 1.0)?),
            StateSpec::Mixture { a, b, weight } => a.resolve(ideal)?.mix_with(&b.resolve(ideal)?, *weight),
            StateSpec::RandomPure { seed } => random_pure_state(n, &mut stream(*seed, &[])),
            StateSpec::RandomMixed { seed, rank } => random_density_matrix(n, *rank, &mut stream(*seed, &[])),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProverSpec {
    Honest,
    IidDeviated { epsilon_prime: f64, eta: StateSpec },
    CoherentError { gates: Vec<GateRecord> },
    Fixed { state: StateSpec },
    PerRegister { states: Vec<StateSpec> },
    ClassicallyCorrelated { weights: Vec<f64>, strategies: Vec<Vec<StateSpec>> },
    /// Hypergraph only, toy sizes: `(|ideal>^{⊗T} + |bad>^{⊗T})/norm`.
    EntangledCat { bad: StateSpec },
}

impl ProverSpec {
    /// The product-form model; `None` for the entangled demo prover.
    pub fn to_model(&self, ideal: &DenseState) -> Result<Option<ProverModel>> {
        let resolve_all = |v: &[StateSpec]| v.iter().map(|s| s.resolve(ideal)).collect::<Result<Vec<_>>>();
        Ok(Some(match self {
            ProverSpec::Honest => ProverModel::Honest,
            ProverSpec::IidDeviated { epsilon_prime, eta } => ProverModel::IidDeviated {
                epsilon_prime: *epsilon_prime,
                eta: eta.resolve(ideal)?,
            },
            ProverSpec::CoherentError { gates } => ProverModel::CoherentError {
                gates: gates_from_records(gates)?,
            },
            ProverSpec::Fixed { state } => ProverModel::Fixed {
                state: state.resolve(ideal)?,
            },
            ProverSpec::PerRegister { states } => ProverModel::PerRegister {
                states: resolve_all(states)?,
            },
            ProverSpec::ClassicallyCorrelated { weights, strategies } => ProverModel::ClassicallyCorrelated {
                weights: weights.clone(),
                strategies: strategies.iter().map(|s| resolve_all(s)).collect::<Result<_>>()?,
            },
            ProverSpec::EntangledCat { .. } => return Ok(None),
        }))
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub k: Option<u64>,
    #[serde(default)]
    pub m: Option<u64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: String,
    /// Path to the Hamiltonian, circuit or hypergraph file, relative to the
    /// config file.
    pub target: PathBuf,
    #[serde(default)]
    pub params: ParamsSpec,
    pub prover: ProverSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub runs: Option<u64>,
}

impl RunConfig {
    pub fn target_path(&self, config_path: &Path) -> PathBuf {
        if self.target.is_absolute() {
            self.target.clone()
        } else {
            config_path.parent().unwrap_or(Path::new(".")).join(&self.target)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_round_trip() {
        let text = r#"{"n_qubits": 2, "terms": [{"pauli": "ZZ", "coeff": -1.0}, {"pauli": "XI", "coeff": 0.5}], "gap": 1.0}"#;
        let f: HamiltonianFile = parse_json(text).unwrap();
        let h = f.into_spec().unwrap();
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.gap_lower_bound(), Some(1.0));
        let back = serde_json::to_string(&HamiltonianFile::from_spec(&h)).unwrap();
        assert!(back.contains("\"ZZ\""));
        assert!(parse_json::<HamiltonianFile>(r#"{"n_qubits": 2, "terms": [{"pauli": "Z", "coeff": 1}]}"#)
            .unwrap()
            .into_spec()
            .is_err());
    }

    #[test]
    fn circuit_and_hypergraph_files() {
        let c: CircuitFile = parse_json(r#"{"n_qubits": 3, "gates": [{"name": "CCZ", "qubits": [0,1,2]}, {"name": "RZ", "qubits": [1], "angle": 0.3}]}"#).unwrap();
        let spec = c.into_spec().unwrap();
        assert_eq!(spec.gates().len(), 2);
        let g: HypergraphFile = parse_json(r#"{"n_vertices": 3, "edges": [[2,1,0]]}"#).unwrap();
        assert_eq!(g.into_spec().unwrap().edges(), &[vec![0, 1, 2]]);
        assert!(parse_json::<HypergraphFile>(r#"{"n_vertices": 3, "edges": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn state_specs() {
        let ideal = DenseState::plus(2).unwrap();
        let s: StateSpec = parse_json(r#"{"kind": "mixture", "a": {"kind": "ideal"}, "b": {"kind": "maximally_mixed"}, "weight": 0.5}"#).unwrap();
        let rho = s.resolve(&ideal).unwrap();
        assert!((rho.fidelity_with_pure(ideal.amplitudes().unwrap()).unwrap() - 0.625).abs() < 1e-12);
        let p: ProverSpec = parse_json(r#"{"kind": "fixed", "state": {"kind": "pauli_on_ideal", "pauli": "ZI"}}"#).unwrap();
        assert!(p.to_model(&ideal).unwrap().is_some());
    }
}
