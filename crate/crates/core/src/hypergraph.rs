//! Hypergraph states `|G> = Π_e C̃Z_e |+>^N`, their stabilizers
//! `g_i = (Π C̃Z) X_i (Π C̃Z)`, and the adaptive expansion
//! `g_i = Σ_a (-1)^{α(a)} X_{v_i} Z(W̃_Z(a)) P(a on W̃_P)` used by the
//! adaptive stabilizer test.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitSpec, Gate};
use crate::state::{check_cap, qubit_bit, DenseState, Operator};
use crate::{Error, Result, DENSITY_CAP, PURE_CAP};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphSpec {
    n_vertices: usize,
    /// Each edge sorted ascending; the list sorted lexicographically.
    edges: Vec<Vec<usize>>,
    max_edge_size: usize,
}

impl HypergraphSpec {
    /// Validates and canonicalises. The edge-size bound `c` defaults to
    /// `max(3, largest edge)`.
    pub fn new(n_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let c = edges.iter().map(Vec::len).max().unwrap_or(0).max(3);
        Self::with_max_edge_size(n_vertices, edges, c)
    }

    pub fn with_max_edge_size(n_vertices: usize, edges: Vec<Vec<usize>>, c: usize) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::invalid("hypergraph needs at least one vertex"));
        }
        if c < 3 {
            return Err(Error::invalid(format!("edge-size bound must be at least 3, got {c}")));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            if e.len() < 2 || e.len() > c {
                return Err(Error::invalid(format!("edge {e:?} has size outside [2, {c}]")));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("edge {e:?} repeats a vertex")));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n_vertices) {
                return Err(Error::invalid(format!("vertex {v} out of range for {n_vertices} vertices")));
            }
            canon.push(e);
        }
        canon.sort();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate hyperedge"));
        }
        Ok(HypergraphSpec {
            n_vertices,
            edges: canon,
            max_edge_size: c,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn max_edge_size(&self) -> usize {
        self.max_edge_size
    }

    fn edge_masks(&self) -> Vec<u64> {
        let n = self.n_vertices;
        self.edges
            .iter()
            .map(|e| e.iter().fold(0, |m, &v| m | qubit_bit(n, v)))
            .collect()
    }

    /// `+1` / `-1` phase of `Π C̃Z_e` on each basis index.
    fn phases(&self) -> Vec<f64> {
        let masks = self.edge_masks();
        (0..1usize << self.n_vertices)
            .map(|b| {
                let flips = masks.iter().filter(|&&m| b as u64 & m == m).count();
                if flips % 2 == 1 {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect()
    }

    pub fn build_state(&self) -> Result<DenseState> {
        check_cap("hypergraph state", PURE_CAP, self.n_vertices)?;
        let amp = (1.0 / (1u64 << self.n_vertices) as f64).sqrt();
        let amps = self.phases().into_iter().map(|s| Complex64::new(s * amp, 0.0)).collect();
        DenseState::pure(self.n_vertices, amps)
    }

    fn check_vertex(&self, i: usize) -> Result<()> {
        if i >= self.n_vertices {
            Err(Error::invalid(format!("vertex {i} out of range for {} vertices", self.n_vertices)))
        } else {
            Ok(())
        }
    }

    /// Dense `(Π C̃Z) X_i (Π C̃Z)`.
    pub fn stabilizer_dense(&self, i: usize) -> Result<Operator> {
        self.check_vertex(i)?;
        check_cap("dense stabilizer", DENSITY_CAP, self.n_vertices)?;
        let d = self.phases();
        let dim = d.len();
        let flip = qubit_bit(self.n_vertices, i) as usize;
        let mut m = Operator::zeros(dim, dim);
        for b in 0..dim {
            m[(b, b ^ flip)] = Complex64::new(d[b] * d[b ^ flip], 0.0);
        }
        Ok(m)
    }

    pub fn adaptive_form(&self, i: usize) -> Result<AdaptiveStabilizerForm> {
        self.check_vertex(i)?;
        let mut z_neighbors = Vec::new();
        let mut cz_groups = Vec::new();
        for e in self.edges.iter().filter(|e| e.contains(&i)) {
            let rest: Vec<usize> = e.iter().copied().filter(|&v| v != i).collect();
            if rest.len() == 1 {
                z_neighbors.push(rest[0]);
            } else {
                cz_groups.push(rest);
            }
        }
        z_neighbors.sort_unstable();
        // W̃_P: every group member except its designated Z-carrier (the
        // largest index, since members are sorted).
        let projector_support: BTreeSet<usize> = cz_groups
            .iter()
            .flat_map(|g| g[..g.len() - 1].iter().copied())
            .collect();
        Ok(AdaptiveStabilizerForm {
            n_vertices: self.n_vertices,
            vertex: i,
            z_neighbors,
            cz_groups,
            projector_support: projector_support.into_iter().collect(),
        })
    }

    pub fn adaptive_forms(&self) -> Result<Vec<AdaptiveStabilizerForm>> {
        (0..self.n_vertices).map(|i| self.adaptive_form(i)).collect()
    }

    pub fn connectivity(&self) -> Connectivity {
        let mut per_vertex = vec![0usize; self.n_vertices];
        for e in &self.edges {
            for &v in e {
                per_vertex[v] += 1;
            }
        }
        Connectivity {
            xi: per_vertex.iter().copied().max().unwrap_or(0),
            per_vertex,
        }
    }

    /// The preparing circuit `Π_e C̃Z_e` acting on `|+>^N`.
    pub fn to_circuit(&self) -> CircuitSpec {
        let gates = self
            .edges
            .iter()
            .map(|e| match e.len() {
                2 => Gate::Cz(e[0], e[1]),
                3 => Gate::Ccz(e[0], e[1], e[2]),
                _ => Gate::Mcz(e.clone()),
            })
            .collect();
        CircuitSpec::new(self.n_vertices, gates).expect("hypergraph edges are valid gate supports")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    /// `ξ = max_v ξ_v`.
    pub xi: usize,
    /// `ξ_v`: number of hyperedges containing `v`.
    pub per_vertex: Vec<usize>,
}

/// Classical data of the adaptive test for `g_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdaptiveStabilizerForm {
    n_vertices: usize,
    vertex: usize,
    /// `W_Z`: partners of `v_i` in 2-edges.
    z_neighbors: Vec<usize>,
    /// `W_CZ`: each hyperedge of size ≥ 3 through `v_i`, minus `v_i`,
    /// sorted so the last element carries the `Z`.
    cz_groups: Vec<Vec<usize>>,
    /// `W̃_P`, sorted.
    projector_support: Vec<usize>,
}

/// Resolver output for one assignment `a` of the projector support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    /// `α ∈ {0, 1}`.
    pub alpha: u8,
    /// `W̃_Z(a)`, sorted.
    pub z_support: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Factor {
    Z(usize),
    Proj(usize, bool),
}

impl AdaptiveStabilizerForm {
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn z_neighbors(&self) -> &[usize] {
        &self.z_neighbors
    }

    pub fn cz_groups(&self) -> &[Vec<usize>] {
        &self.cz_groups
    }

    pub fn projector_support(&self) -> &[usize] {
        &self.projector_support
    }

    /// No adaptivity needed (graph-state case).
    pub fn is_static(&self) -> bool {
        self.projector_support.is_empty()
    }

    /// Resolves `a`, given as one bit per projector-support vertex in order.
    pub fn resolve(&self, a: &[bool]) -> Result<Resolution> {
        if a.len() != self.projector_support.len() {
            return Err(Error::invalid(format!(
                "assignment has {} bits, projector support has {}",
                a.len(),
                self.projector_support.len()
            )));
        }
        Ok(self.resolve_with(|v| {
            let pos = self.projector_support.binary_search(&v).expect("vertex in projector support");
            a[pos]
        }))
    }

    /// Resolves with `bit(v)` giving `a_v` for each `v ∈ W̃_P`.
    pub fn resolve_with<F: Fn(usize) -> bool>(&self, bit: F) -> Resolution {
        // Operator word of the right-hand side for this a: the W_Z factors,
        // each group's Z on its carrier when every other member reads 1,
        // then the projectors on W̃_P.
        let mut word: Vec<Factor> = self.z_neighbors.iter().map(|&v| Factor::Z(v)).collect();
        for g in &self.cz_groups {
            let (carrier, rest) = g.split_last().expect("groups have at least two members");
            if rest.iter().all(|&v| bit(v)) {
                word.push(Factor::Z(*carrier));
            }
        }
        word.extend(self.projector_support.iter().map(|&v| Factor::Proj(v, bit(v))));
        normal_order(&word)
    }

    /// Enumerates the resolver over every assignment, in binary order of
    /// `a` (first support vertex most significant).
    pub fn resolution_table(&self) -> Result<Vec<(Vec<bool>, Resolution)>> {
        let m = self.projector_support.len();
        if m > 24 {
            return Err(Error::CapExceeded {
                what: "resolver enumeration",
                cap: 24,
                requested: m,
            });
        }
        Ok((0..1usize << m)
            .map(|code| {
                let a: Vec<bool> = (0..m).map(|j| code >> (m - 1 - j) & 1 == 1).collect();
                let r = self.resolve(&a).expect("width checked");
                (a, r)
            })
            .collect())
    }

    /// The verifier's decision rule in words, one line per assignment, with
    /// 1-based vertex labels and outcomes `±1` (`z_j = 1` is `a_j = 0`),
    /// e.g. `If z_2=-1 and x_1z_3=1, the verifier accepts.`
    pub fn branch_rules(&self) -> Result<Vec<String>> {
        let label = |v: usize| v + 1;
        Ok(self
            .resolution_table()?
            .into_iter()
            .map(|(a, res)| {
                let mut conds: Vec<String> = self
                    .projector_support
                    .iter()
                    .zip(&a)
                    .map(|(&v, &bit)| format!("z_{}={}", label(v), if bit { "-1" } else { "1" }))
                    .collect();
                let mut product = format!("x_{}", label(self.vertex));
                for &v in &res.z_support {
                    product.push_str(&format!("z_{}", label(v)));
                }
                conds.push(format!("{product}={}", if res.alpha == 1 { "-1" } else { "1" }));
                format!("If {}, the verifier accepts.", conds.join(" and "))
            })
            .collect())
    }

    /// Dense `Σ_a (-1)^α X_{v_i} Z(W̃_Z(a)) P(a)`.
    pub fn expansion_dense(&self) -> Result<Operator> {
        let n = self.n_vertices;
        check_cap("dense stabilizer", DENSITY_CAP, n)?;
        let dim = 1usize << n;
        let flip = qubit_bit(n, self.vertex) as usize;
        let mut m = Operator::zeros(dim, dim);
        for (a, res) in self.resolution_table()? {
            let (mut pmask, mut pval) = (0usize, 0usize);
            for (j, &v) in self.projector_support.iter().enumerate() {
                pmask |= qubit_bit(n, v) as usize;
                if a[j] {
                    pval |= qubit_bit(n, v) as usize;
                }
            }
            let zmask = res.z_support.iter().fold(0usize, |acc, &v| acc | qubit_bit(n, v) as usize);
            let sign = if res.alpha == 1 { -1.0 } else { 1.0 };
            // X Z P |c> = [c matches a] (-1)^{|c ∧ z|} |c ⊕ flip>
            for c in (0..dim).filter(|c| c & pmask == pval) {
                let s = if (c & zmask).count_ones() % 2 == 1 { -sign } else { sign };
                m[(c ^ flip, c)] += Complex64::new(s, 0.0);
            }
        }
        Ok(m)
    }
}

/// Reduces a commuting word of `Z` and projector factors to
/// `(-1)^α Z(W̃_Z) Π P`: `Z Z = I` and `Z_v |a><a|_v = (-1)^a |a><a|_v`.
fn normal_order(word: &[Factor]) -> Resolution {
    let mut z_odd: BTreeSet<usize> = BTreeSet::new();
    let mut projected: Vec<(usize, bool)> = Vec::new();
    for f in word {
        match *f {
            Factor::Z(v) => {
                if !z_odd.remove(&v) {
                    z_odd.insert(v);
                }
            }
            Factor::Proj(v, a) => projected.push((v, a)),
        }
    }
    let mut alpha = 0u8;
    for (v, a) in projected {
        if z_odd.remove(&v) && a {
            alpha ^= 1;
        }
    }
    Resolution {
        alpha,
        z_support: z_odd.into_iter().collect(),
    }
}

/// Each 2- and 3-subset of `n` vertices included independently with
/// probability `edge_prob`; `c = 3`.
pub fn random_bms_hypergraph<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Result<HypergraphSpec> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::invalid(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push(vec![a, b]);
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if rng.random_bool(edge_prob) {
                    edges.push(vec![a, b, c]);
                }
            }
        }
    }
    HypergraphSpec::with_max_edge_size(n, edges, 3)
}

/// Random IQP instance with `Z`, `CZ`, `CCZ` gates: the `CZ`/`CCZ` part is a
/// hypergraph, single-qubit `Z`s are kept as a separate local layer.
#[derive(Clone, Debug, Serialize)]
pub struct IqpInstance {
    pub hypergraph: HypergraphSpec,
    pub local_z: Vec<usize>,
}

pub fn random_iqp_instance<R: Rng + ?Sized>(n: usize, gate_prob: f64, rng: &mut R) -> Result<IqpInstance> {
    let hypergraph = random_bms_hypergraph(n, gate_prob, rng)?;
    let local_z = (0..n).filter(|_| rng.random_bool(gate_prob)).collect();
    Ok(IqpInstance { hypergraph, local_z })
}
