//! Circuit-generated states `|ψ> = U|+>^N` and their generalized
//! stabilizers `g_i = U X_i U^†`, obtained by pushing `X_i` through the gate
//! list one gate at a time.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decompose::decompose_in_pauli_basis;
use crate::hamiltonian::RBudget;
use crate::pauli::{l1_norm, Pauli, PauliString, PauliSum};
use crate::state::{check_cap, i_pow, pauli_sum_matrix, qubit_bit, DenseState, Operator, ONE, ZERO};
use crate::{Error, Result, DENSITY_CAP, DROP_THRESHOLD, PURE_CAP};

/// Default cap on the number of live terms during conjugation.
pub const TERM_CAP: usize = 1 << 18;

/// Largest imaginary residue tolerated on a conjugated coefficient.
const IMAG_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    T(usize),
    Rz(usize, f64),
    Cz(usize, usize),
    /// Control, target.
    Cnot(usize, usize),
    Ccz(usize, usize, usize),
    /// Phase flip on the all-ones subspace of any number of qubits.
    Mcz(Vec<usize>),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "Sdg",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::T(_) => "T",
            Gate::Rz(..) => "RZ",
            Gate::Cz(..) => "CZ",
            Gate::Cnot(..) => "CNOT",
            Gate::Ccz(..) => "CCZ",
            Gate::Mcz(_) => "MCZ",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::T(q) | Gate::Rz(q, _) => vec![*q],
            Gate::Cz(a, b) | Gate::Cnot(a, b) => vec![*a, *b],
            Gate::Ccz(a, b, c) => vec![*a, *b, *c],
            Gate::Mcz(v) => v.clone(),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rz(_, t) => Some(*t),
            _ => None,
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::T(_) | Gate::Rz(..) | Gate::Ccz(..) | Gate::Mcz(_))
    }

    /// Builds a gate from its file-format name (case-insensitive; `S†`,
    /// `SDAG` and `CX` are accepted aliases).
    pub fn from_parts(name: &str, qubits: &[usize], angle: Option<f64>) -> Result<Gate> {
        let upper = name.to_ascii_uppercase();
        let arity = |k: usize| -> Result<()> {
            if qubits.len() == k {
                Ok(())
            } else {
                Err(Error::invalid(format!("gate {name} takes {k} qubit(s), got {}", qubits.len())))
            }
        };
        let no_angle = || -> Result<()> {
            match angle {
                None => Ok(()),
                Some(_) => Err(Error::invalid(format!("gate {name} takes no angle"))),
            }
        };
        let g = match upper.as_str() {
            "H" | "S" | "SDG" | "S†" | "SDAG" | "X" | "Y" | "Z" | "T" => {
                arity(1)?;
                no_angle()?;
                let q = qubits[0];
                match upper.as_str() {
                    "H" => Gate::H(q),
                    "S" => Gate::S(q),
                    "X" => Gate::X(q),
                    "Y" => Gate::Y(q),
                    "Z" => Gate::Z(q),
                    "T" => Gate::T(q),
                    _ => Gate::Sdg(q),
                }
            }
            "RZ" => {
                arity(1)?;
                let theta = angle.ok_or_else(|| Error::invalid("RZ needs an angle"))?;
                if !theta.is_finite() {
                    return Err(Error::invalid("RZ angle must be finite"));
                }
                Gate::Rz(qubits[0], theta)
            }
            "CZ" => {
                arity(2)?;
                no_angle()?;
                Gate::Cz(qubits[0], qubits[1])
            }
            "CNOT" | "CX" => {
                arity(2)?;
                no_angle()?;
                Gate::Cnot(qubits[0], qubits[1])
            }
            "CCZ" => {
                arity(3)?;
                no_angle()?;
                Gate::Ccz(qubits[0], qubits[1], qubits[2])
            }
            "MCZ" => {
                no_angle()?;
                if qubits.is_empty() {
                    return Err(Error::invalid("MCZ needs at least one qubit"));
                }
                Gate::Mcz(qubits.to_vec())
            }
            _ => return Err(Error::invalid(format!("unknown gate {name:?}"))),
        };
        Ok(g)
    }

    /// 2×2 matrix of a single-qubit gate.
    fn single_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        Some(match self {
            Gate::H(_) => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
            Gate::S(_) => [[ONE, ZERO], [ZERO, c(0.0, 1.0)]],
            Gate::Sdg(_) => [[ONE, ZERO], [ZERO, c(0.0, -1.0)]],
            Gate::X(_) => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Y(_) => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
            Gate::Z(_) => [[ONE, ZERO], [ZERO, -ONE]],
            Gate::T(_) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, FRAC_PI_4)]],
            Gate::Rz(_, t) => [
                [Complex64::from_polar(1.0, -t / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, t / 2.0)],
            ],
            _ => return None,
        })
    }

    /// Diagonal of a diagonal gate on its own qubits, indexed with the first
    /// listed qubit as the most significant local bit.
    fn local_diagonal(&self) -> Option<Vec<Complex64>> {
        match self {
            Gate::T(_) | Gate::Rz(..) | Gate::S(_) | Gate::Sdg(_) | Gate::Z(_) => {
                let m = self.single_matrix().expect("single-qubit gate");
                Some(vec![m[0][0], m[1][1]])
            }
            Gate::Cz(..) | Gate::Ccz(..) | Gate::Mcz(_) => {
                let k = self.qubits().len();
                let mut d = vec![ONE; 1 << k];
                d[(1 << k) - 1] = -ONE;
                Some(d)
            }
            _ => None,
        }
    }
}

/// File-format view of a gate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateRecord {
    pub name: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        GateRecord {
            name: g.name().to_string(),
            qubits: g.qubits(),
            angle: g.angle(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("circuit needs at least one qubit"));
        }
        for g in &gates {
            let qs = g.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::invalid(format!("gate {} acts on qubit {q}, circuit has {n_qubits}", g.name())));
            }
            let mut sorted = qs.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("gate {} repeats a qubit in {qs:?}", g.name())));
            }
        }
        Ok(CircuitSpec { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    /// `U|+>^N`, gates applied in list order.
    pub fn prepare_state(&self) -> Result<DenseState> {
        let mut amps = DenseState::plus(self.n_qubits)?.amplitudes().expect("pure").to_vec();
        check_cap("circuit state", PURE_CAP, self.n_qubits)?;
        for g in &self.gates {
            apply_gate(self.n_qubits, g, &mut amps);
        }
        DenseState::pure_normalized(self.n_qubits, amps)
    }

    pub fn unitary(&self) -> Result<Operator> {
        check_cap("circuit unitary", DENSITY_CAP, self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut u = Operator::zeros(dim, dim);
        for col in 0..dim {
            let mut v = vec![ZERO; dim];
            v[col] = ONE;
            for g in &self.gates {
                apply_gate(self.n_qubits, g, &mut v);
            }
            for (row, x) in v.into_iter().enumerate() {
                u[(row, col)] = x;
            }
        }
        Ok(u)
    }
}

/// Applies one gate in place to a state vector.
pub fn apply_gate(n: usize, g: &Gate, amps: &mut [Complex64]) {
    if let Gate::Cnot(c, t) = g {
        let (cb, tb) = (qubit_bit(n, *c) as usize, qubit_bit(n, *t) as usize);
        for b in 0..amps.len() {
            if b & cb != 0 && b & tb == 0 {
                amps.swap(b, b | tb);
            }
        }
        return;
    }
    if let Some(m) = g.single_matrix() {
        let bit = qubit_bit(n, g.qubits()[0]) as usize;
        for b in (0..amps.len()).filter(|b| b & bit == 0) {
            let (a0, a1) = (amps[b], amps[b | bit]);
            amps[b] = m[0][0] * a0 + m[0][1] * a1;
            amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        return;
    }
    let mask = g.qubits().iter().fold(0usize, |m, &q| m | qubit_bit(n, q) as usize);
    for (b, a) in amps.iter_mut().enumerate() {
        if b & mask == mask {
            *a = -*a;
        }
    }
}

/// Pauli decomposition of `g_i`.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizerDecomposition {
    n_qubits: usize,
    vertex: usize,
    terms: Vec<PauliString>,
    r: f64,
    weights: Vec<f64>,
}

impl StabilizerDecomposition {
    pub fn new(n_qubits: usize, vertex: usize, terms: Vec<PauliString>) -> Result<Self> {
        if vertex >= n_qubits {
            return Err(Error::invalid(format!("qubit {vertex} out of range for {n_qubits} qubits")));
        }
        if let Some(t) = terms.iter().find(|t| t.n_qubits() != n_qubits) {
            return Err(Error::WidthMismatch {
                expected: n_qubits,
                found: t.n_qubits(),
            });
        }
        let terms: Vec<PauliString> = terms.into_iter().filter(|t| t.coeff().abs() > DROP_THRESHOLD).collect();
        if terms.is_empty() {
            return Err(Error::invalid("stabilizer decomposition has no terms"));
        }
        let r = l1_norm(&terms);
        let weights = terms.iter().map(|t| t.coeff().abs() / r).collect();
        Ok(StabilizerDecomposition {
            n_qubits,
            vertex,
            terms,
            r,
            weights,
        })
    }

    /// Decomposes a dense `g_i` (any unitary, `N ≤ 8`).
    pub fn from_dense(vertex: usize, g: &Operator) -> Result<Self> {
        let n = g.nrows().trailing_zeros() as usize;
        Self::new(n, vertex, decompose_in_pauli_basis(g)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// `R_i = Σ_j |c_j|`.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sampling_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_j c_j²`; equals 1 because `g_i² = I` and Pauli strings are
    /// orthonormal under `Tr[A†B]/2^N`.
    pub fn sum_of_squares(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff() * t.coeff()).sum()
    }

    pub fn dense(&self) -> Result<Operator> {
        pauli_sum_matrix(self.n_qubits, &self.terms)
    }
}

/// `g_i = U X_i U^†` with the default term cap.
pub fn conjugate_through_circuit(c: &CircuitSpec, i: usize) -> Result<StabilizerDecomposition> {
    conjugate_with_cap(c, i, TERM_CAP)
}

pub fn conjugate_with_cap(c: &CircuitSpec, i: usize, cap: usize) -> Result<StabilizerDecomposition> {
    let n = c.n_qubits;
    if i >= n {
        return Err(Error::invalid(format!("qubit {i} out of range for {n} qubits")));
    }
    let terms = push_through(c, vec![PauliString::single(n, i, Pauli::X, 1.0)], cap)?;
    StabilizerDecomposition::new(n, i, terms)
}

/// `U P U^†` for an arbitrary Pauli string, as merged terms.
pub fn conjugate_pauli(c: &CircuitSpec, p: &PauliString) -> Result<Vec<PauliString>> {
    if p.n_qubits() != c.n_qubits {
        return Err(Error::WidthMismatch {
            expected: c.n_qubits,
            found: p.n_qubits(),
        });
    }
    push_through(c, vec![p.clone()], TERM_CAP)
}

fn push_through(c: &CircuitSpec, mut terms: Vec<PauliString>, cap: usize) -> Result<Vec<PauliString>> {
    for g in &c.gates {
        terms = conjugate_terms(c.n_qubits, g, terms, cap)?;
    }
    Ok(terms)
}

/// Every `g_i`, `i = 0..N`.
pub fn all_stabilizers(c: &CircuitSpec) -> Result<Vec<StabilizerDecomposition>> {
    (0..c.n_qubits).map(|i| conjugate_through_circuit(c, i)).collect()
}

/// `G P G^†` term by term.
fn conjugate_terms(n: usize, g: &Gate, terms: Vec<PauliString>, cap: usize) -> Result<Vec<PauliString>> {
    if g.is_clifford() {
        return Ok(terms
            .into_iter()
            .map(|mut p| {
                conjugate_clifford(g, &mut p);
                p
            })
            .collect());
    }
    let qubits = g.qubits();
    let diag = g.local_diagonal().expect("non-Clifford gates in the set are diagonal");
    let mut sum = PauliSum::new(n);
    for p in terms {
        for q in conjugate_diagonal(&qubits, &diag, &p)? {
            sum.add(q)?;
        }
        if sum.len() > cap {
            return Err(Error::Intractable { cap });
        }
    }
    Ok(sum.into_terms())
}

fn conjugate_clifford(g: &Gate, p: &mut PauliString) {
    let negate = match *g {
        Gate::H(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            p.set_bits(q, z, x);
            x && z
        }
        Gate::X(q) => p.z_bit(q),
        Gate::Z(q) => p.x_bit(q),
        Gate::Y(q) => p.x_bit(q) != p.z_bit(q),
        Gate::S(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            p.set_bits(q, x, z ^ x);
            x && z
        }
        Gate::Sdg(q) => {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            p.set_bits(q, x, z ^ x);
            x && !z
        }
        Gate::Cz(a, b) => {
            let (xa, za, xb, zb) = (p.x_bit(a), p.z_bit(a), p.x_bit(b), p.z_bit(b));
            p.set_bits(a, xa, za ^ xb);
            p.set_bits(b, xb, zb ^ xa);
            xa && xb && (za != zb)
        }
        Gate::Cnot(c, t) => {
            let (xc, zc, xt, zt) = (p.x_bit(c), p.z_bit(c), p.x_bit(t), p.z_bit(t));
            p.set_bits(t, xt ^ xc, zt);
            p.set_bits(c, xc, zc ^ zt);
            xc && zt && (xt == zc)
        }
        _ => unreachable!("non-Clifford gate"),
    };
    if negate {
        p.set_coeff(-p.coeff());
    }
}

/// Conjugation by a diagonal gate `D` on `qubits`.
///
/// On the gate's support write the string as `i^{|s∧T|} X^s Z^T`. Then
/// `D X^s Z^T D^† = X^s Δ_s Z^T` with `Δ_s(y) = d(y⊕s) d̄(y)`, and expanding
/// `Δ_s = Σ_t w_t Z^t` gives the terms `X^s Z^{t⊕T}`.
fn conjugate_diagonal(qubits: &[usize], d: &[Complex64], p: &PauliString) -> Result<Vec<PauliString>> {
    let k = qubits.len();
    let local = |get: &dyn Fn(usize) -> bool| -> usize {
        qubits.iter().fold(0usize, |acc, &q| (acc << 1) | get(q) as usize)
    };
    let s = local(&|q| p.x_bit(q));
    let t_mask = local(&|q| p.z_bit(q));
    if s == 0 {
        return Ok(vec![p.clone()]);
    }
    let dim = 1usize << k;
    let delta: Vec<Complex64> = (0..dim).map(|y| d[y ^ s] * d[y].conj()).collect();
    let lead = i_pow((s & t_mask).count_ones());
    let mut out = Vec::new();
    for t in 0..dim {
        let w: Complex64 = delta
            .iter()
            .enumerate()
            .map(|(y, &v)| if (y & t).count_ones() % 2 == 1 { -v } else { v })
            .sum::<Complex64>()
            / dim as f64;
        if w.norm() <= DROP_THRESHOLD {
            continue;
        }
        let zt = t ^ t_mask;
        let c = lead * w * i_pow(4 - (s & zt).count_ones() % 4) * p.coeff();
        if c.im.abs() > IMAG_TOL * c.norm().max(1.0) {
            return Err(Error::invalid(format!("conjugated coefficient {c} is not real")));
        }
        let mut q = p.clone();
        for (j, &qb) in qubits.iter().enumerate() {
            let bit = k - 1 - j;
            q.set_bits(qb, s >> bit & 1 == 1, zt >> bit & 1 == 1);
        }
        q.set_coeff(c.re);
        out.push(q);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CircuitConditionReport {
    pub sampling_materialized: bool,
    /// `R = max_i R_i`.
    pub r: f64,
    pub r_per_qubit: Vec<f64>,
    pub budget: f64,
    pub r_within_budget: bool,
    pub r_known: bool,
    /// Smallest observed `R_i`.
    pub min_r_i: f64,
    /// Largest `|Σ_j c_j² − 1|` over the decompositions.
    pub max_norm_defect: f64,
    pub n_terms: Vec<usize>,
}

pub fn check_circuit_conditions(decomps: &[StabilizerDecomposition], budget: RBudget) -> Result<CircuitConditionReport> {
    let first = decomps.first().ok_or_else(|| Error::invalid("no stabilizer decompositions supplied"))?;
    let n = first.n_qubits;
    if decomps.len() != n {
        return Err(Error::invalid(format!("expected {n} decompositions, got {}", decomps.len())));
    }
    let r_per_qubit: Vec<f64> = decomps.iter().map(|d| d.r).collect();
    let r = r_per_qubit.iter().copied().fold(0.0, f64::max);
    let b = budget.at(n);
    Ok(CircuitConditionReport {
        sampling_materialized: true,
        r,
        budget: b,
        r_within_budget: r <= b,
        r_known: true,
        min_r_i: r_per_qubit.iter().copied().fold(f64::INFINITY, f64::min),
        max_norm_defect: decomps.iter().map(|d| (d.sum_of_squares() - 1.0).abs()).fold(0.0, f64::max),
        n_terms: decomps.iter().map(|d| d.terms.len()).collect(),
        r_per_qubit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{max_abs_diff, pauli_matrix};

    fn dense_conjugate(c: &CircuitSpec, i: usize) -> Operator {
        let u = c.unitary().unwrap();
        let x = pauli_matrix(&PauliString::single(c.n_qubits(), i, Pauli::X, 1.0)).unwrap();
        &u * x * u.adjoint()
    }

    fn gates_on(n: usize) -> Vec<Gate> {
        let mut v = vec![];
        for q in 0..n {
            v.extend([Gate::H(q), Gate::S(q), Gate::Sdg(q), Gate::X(q), Gate::Y(q), Gate::Z(q), Gate::T(q), Gate::Rz(q, 0.37)]);
        }
        v.extend([Gate::Cz(0, 1), Gate::Cz(1, 0), Gate::Cnot(0, 1), Gate::Cnot(1, 0)]);
        if n >= 3 {
            v.extend([Gate::Ccz(0, 1, 2), Gate::Ccz(2, 0, 1), Gate::Mcz(vec![1, 2])]);
        }
        v
    }

    #[test]
    fn rule_table_matches_dense_conjugation() {
        // Every gate against every Pauli string on its support (3 qubits
        // covers all supports used here).
        let n = 3;
        for g in gates_on(n) {
            let u = CircuitSpec::new(n, vec![g.clone()]).unwrap().unitary().unwrap();
            for code in 0..64u32 {
                let paulis: Vec<Pauli> = (0..n).map(|q| Pauli::ALL[(code >> (2 * q) & 3) as usize]).collect();
                let p = PauliString::from_paulis(&paulis, 1.0);
                let conj = conjugate_terms(n, &g, vec![p.clone()], TERM_CAP).unwrap();
                let got = pauli_sum_matrix(n, &conj).unwrap();
                let pm = pauli_matrix(&p).unwrap();
                let want = &u * pm * u.adjoint();
                assert!(max_abs_diff(&got, &want) < 1e-12, "{g:?} on {}", p.label());
            }
        }
    }

    #[test]
    fn identity_circuit() {
        let c = CircuitSpec::new(3, vec![]).unwrap();
        let d = conjugate_through_circuit(&c, 1).unwrap();
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.terms()[0].label(), "IXI");
        assert_eq!(d.r(), 1.0);
    }

    #[test]
    fn cz_gives_graph_stabilizer() {
        let c = CircuitSpec::new(2, vec![Gate::Cz(0, 1)]).unwrap();
        let d = conjugate_through_circuit(&c, 0).unwrap();
        assert_eq!(d.terms()[0].label(), "XZ");
        assert_eq!(d.terms()[0].coeff(), 1.0);
    }

    #[test]
    fn ccz_gives_four_terms() {
        let c = CircuitSpec::new(3, vec![Gate::Ccz(0, 1, 2)]).unwrap();
        let d = conjugate_through_circuit(&c, 0).unwrap();
        let got: Vec<(String, f64)> = d.terms().iter().map(|t| (t.label(), t.coeff())).collect();
        assert_eq!(
            got,
            vec![("XII".into(), 0.5), ("XIZ".into(), 0.5), ("XZI".into(), 0.5), ("XZZ".into(), -0.5)]
        );
        assert!((d.r() - 2.0).abs() < 1e-15);
        let fallback = StabilizerDecomposition::from_dense(0, &dense_conjugate(&c, 0)).unwrap();
        assert!(max_abs_diff(&fallback.dense().unwrap(), &d.dense().unwrap()) < 1e-10);
    }

    #[test]
    fn mixed_circuit_matches_dense() {
        let c = CircuitSpec::new(
            3,
            vec![Gate::H(0), Gate::T(1), Gate::Cnot(0, 2), Gate::Ccz(0, 1, 2), Gate::Rz(2, 1.1), Gate::S(1), Gate::Cz(1, 2)],
        )
        .unwrap();
        for i in 0..3 {
            let d = conjugate_through_circuit(&c, i).unwrap();
            assert!(max_abs_diff(&d.dense().unwrap(), &dense_conjugate(&c, i)) < 1e-10);
            assert!((d.sum_of_squares() - 1.0).abs() < 1e-10 && d.r() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn term_cap_is_enforced() {
        let gates = vec![Gate::Ccz(0, 1, 2), Gate::H(1), Gate::H(2), Gate::Ccz(0, 1, 2)];
        let c = CircuitSpec::new(3, gates).unwrap();
        assert!(matches!(conjugate_with_cap(&c, 0, 2), Err(Error::Intractable { cap: 2 })));
    }

    #[test]
    fn gate_parsing() {
        assert_eq!(Gate::from_parts("s†", &[0], None).unwrap(), Gate::Sdg(0));
        assert_eq!(Gate::from_parts("cx", &[0, 1], None).unwrap(), Gate::Cnot(0, 1));
        assert!(Gate::from_parts("RZ", &[0], None).is_err());
        assert!(Gate::from_parts("CCZ", &[0, 1], None).is_err());
        assert!(Gate::from_parts("FOO", &[0], None).is_err());
        assert!(CircuitSpec::new(2, vec![Gate::Cz(0, 0)]).is_err());
        assert!(CircuitSpec::new(2, vec![Gate::H(2)]).is_err());
    }

    #[test]
    fn conditions() {
        assert!(check_circuit_conditions(&[], RBudget::default()).is_err());
        let c = CircuitSpec::new(2, vec![Gate::H(0), Gate::Cnot(0, 1)]).unwrap();
        let rep = check_circuit_conditions(&all_stabilizers(&c).unwrap(), RBudget::default()).unwrap();
        assert_eq!(rep.r, 1.0);
        assert!(rep.r_within_budget);
    }
}
