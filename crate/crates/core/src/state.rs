//! Exact dense N-qubit states and operators.
//!
//! Basis index convention: qubit `q` of an `N`-qubit register is bit
//! `N-1-q` of the computational-basis index, matching the left-to-right
//! order of tensor products.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::PauliString;
use crate::{Error, Result, DENSITY_CAP, PURE_CAP};

pub type Operator = DMatrix<Complex64>;

const STATE_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Dense-index bit of qubit `q` in an `n`-qubit register.
#[inline]
pub fn qubit_bit(n: usize, q: usize) -> u64 {
    1u64 << (n - 1 - q)
}

pub(crate) fn check_cap(what: &'static str, cap: usize, n: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded {
            what,
            cap,
            requested: n,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn check_width(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::WidthMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `σ|b> = phase(b) |b ⊕ x>` for a Hermitian Pauli string with dense masks
/// `(x, z)` and `y` factors equal to `Y`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliAction {
    pub x: u64,
    pub z: u64,
    pub y_phase: Complex64,
}

impl PauliAction {
    pub fn of(p: &PauliString) -> Self {
        let (x, z) = p.dense_masks();
        PauliAction {
            x,
            z,
            y_phase: i_pow(p.y_count()),
        }
    }

    #[inline]
    pub fn phase(&self, b: usize) -> Complex64 {
        if (b as u64 & self.z).count_ones() % 2 == 1 {
            -self.y_phase
        } else {
            self.y_phase
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Pure(Vec<Complex64>),
    Mixed(Operator),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    repr: Representation,
}

impl DenseState {
    /// Validated pure state; amplitudes must have unit 2-norm.
    pub fn pure(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_cap("pure-state simulation", PURE_CAP, n)?;
        if n == 0 {
            return Err(Error::InvalidState("zero-qubit register".into()));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::InvalidState(format!(
                "expected {} amplitudes, found {}",
                1usize << n,
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("norm² = {norm}")));
        }
        Ok(DenseState {
            n,
            repr: Representation::Pure(amplitudes),
        })
    }

    /// Pure state from an unnormalised vector.
    pub fn pure_normalized(n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::pure(n, amplitudes)
    }

    /// Validated density matrix: Hermitian, unit trace, PSD (all within 1e-10).
    pub fn mixed(n: usize, rho: Operator) -> Result<Self> {
        check_cap("density-matrix simulation", DENSITY_CAP, n)?;
        if n == 0 {
            return Err(Error::InvalidState("zero-qubit register".into()));
        }
        let dim = 1usize << n;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "expected {dim}x{dim} matrix, found {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let herm = hermiticity_defect(&rho);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("non-Hermitian by {herm:e}")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        let min_eig = hermitian_eigenvalues(&rho)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(DenseState {
            n,
            repr: Representation::Mixed(rho),
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_cap("pure-state simulation", PURE_CAP, n)?;
        if index >= 1 << n {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Self::pure(n, amps)
    }

    /// `|+>^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        check_cap("pure-state simulation", PURE_CAP, n)?;
        let a = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Self::pure(n, vec![a; 1 << n])
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_cap("density-matrix simulation", DENSITY_CAP, n)?;
        let dim = 1usize << n;
        Self::mixed(n, Operator::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Representation::Pure(a) => Some(a),
            Representation::Mixed(_) => None,
        }
    }

    /// Density matrix (`|ψ><ψ|` for pure states).
    pub fn density_matrix(&self) -> Result<Operator> {
        match &self.repr {
            Representation::Mixed(m) => Ok(m.clone()),
            Representation::Pure(a) => {
                check_cap("density-matrix simulation", DENSITY_CAP, self.n)?;
                let dim = a.len();
                Ok(Operator::from_fn(dim, dim, |r, c| a[r] * a[c].conj()))
            }
        }
    }

    /// Same state stored as a density matrix.
    pub fn to_mixed(&self) -> Result<DenseState> {
        Ok(DenseState {
            n: self.n,
            repr: Representation::Mixed(self.density_matrix()?),
        })
    }

    /// `(1 - w) self + w other`.
    pub fn mix_with(&self, other: &DenseState, w: f64) -> Result<DenseState> {
        check_width(self.n, other.n)?;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::invalid(format!("mixing weight {w} outside [0, 1]")));
        }
        let a = self.density_matrix()?;
        let b = other.density_matrix()?;
        let m = a * Complex64::new(1.0 - w, 0.0) + b * Complex64::new(w, 0.0);
        DenseState::mixed(self.n, m)
    }

    /// Probabilities of the computational basis outcomes.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Pure(a) => a.iter().map(|x| x.norm_sqr()).collect(),
            Representation::Mixed(m) => (0..m.nrows()).map(|i| m[(i, i)].re.max(0.0)).collect(),
        }
    }

    /// `<φ|ρ|φ>` for a pure `φ`.
    pub fn fidelity_with_pure(&self, ideal: &[Complex64]) -> Result<f64> {
        if ideal.len() != self.dim() {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: ideal.len().trailing_zeros() as usize,
            });
        }
        let f = match &self.repr {
            Representation::Pure(a) => {
                let ov: Complex64 = ideal.iter().zip(a).map(|(p, q)| p.conj() * q).sum();
                ov.norm_sqr()
            }
            Representation::Mixed(m) => {
                let v = nalgebra::DVector::from_column_slice(ideal);
                (v.adjoint() * m * &v)[(0, 0)].re
            }
        };
        Ok(f.clamp(0.0, 1.0))
    }

    /// `Tr[ρ Π]` for a Hermitian operator `Π`.
    pub fn expectation_operator(&self, op: &Operator) -> Result<f64> {
        if op.nrows() != self.dim() {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: op.nrows().trailing_zeros() as usize,
            });
        }
        let v = match &self.repr {
            Representation::Pure(a) => {
                let v = nalgebra::DVector::from_column_slice(a);
                (v.adjoint() * op * &v)[(0, 0)].re
            }
            Representation::Mixed(m) => (m * op).trace().re,
        };
        Ok(v)
    }

    fn check(&self, p: &PauliString) -> Result<()> {
        check_width(self.n, p.n_qubits())
    }
}

/// `coeff · σ |ψ>` on raw amplitudes.
pub fn apply_pauli_to_amplitudes(amps: &[Complex64], p: &PauliString) -> Vec<Complex64> {
    let act = PauliAction::of(p);
    let c = Complex64::new(p.coeff(), 0.0);
    let mut out = vec![ZERO; amps.len()];
    for (b, a) in amps.iter().enumerate() {
        out[b ^ act.x as usize] = c * act.phase(b) * a;
    }
    out
}

/// Applies a Pauli string to a state.
///
/// For pure states the result is `coeff · σ|ψ>` renormalised, i.e. `σ|ψ>` up
/// to the sign of the coefficient. For density matrices the coefficient is
/// ignored and the result is the conjugation `σ ρ σ`.
pub fn apply_pauli(state: &DenseState, p: &PauliString) -> Result<DenseState> {
    state.check(p)?;
    match &state.repr {
        Representation::Pure(a) => {
            if p.coeff() == 0.0 {
                return Err(Error::invalid("zero coefficient annihilates the state"));
            }
            DenseState::pure_normalized(state.n, apply_pauli_to_amplitudes(a, p))
        }
        Representation::Mixed(m) => {
            let act = PauliAction::of(p);
            let dim = m.nrows();
            let mut out = Operator::zeros(dim, dim);
            // (σρσ)_{b⊕x, c⊕x} = phase(b) ρ_{bc} conj(phase(c))
            for c in 0..dim {
                let pc = act.phase(c).conj();
                for b in 0..dim {
                    out[(b ^ act.x as usize, c ^ act.x as usize)] = act.phase(b) * m[(b, c)] * pc;
                }
            }
            Ok(DenseState {
                n: state.n,
                repr: Representation::Mixed(out),
            })
        }
    }
}

/// `coeff · Tr[ρ σ]`, with the (numerically tiny) imaginary part dropped.
pub fn expectation(state: &DenseState, p: &PauliString) -> Result<f64> {
    state.check(p)?;
    let act = PauliAction::of(p);
    let x = act.x as usize;
    let v: Complex64 = match &state.repr {
        Representation::Pure(a) => a
            .iter()
            .enumerate()
            .map(|(b, amp)| a[b ^ x].conj() * act.phase(b) * amp)
            .sum(),
        // Tr[σρ] = Σ_c phase(c) ρ_{c, c⊕x}
        Representation::Mixed(m) => (0..m.nrows()).map(|c| act.phase(c) * m[(c, c ^ x)]).sum(),
    };
    Ok(p.coeff() * v.re)
}

/// `Tr[ρ P σ]` where `P` projects the qubits in `proj_mask` onto the bit
/// pattern `proj_value` (both dense-index masks).
pub fn expectation_projected(state: &DenseState, p: &PauliString, proj_mask: u64, proj_value: u64) -> Result<f64> {
    state.check(p)?;
    let act = PauliAction::of(p);
    let x = act.x as usize;
    let hit = |b: usize| (b as u64 ^ act.x) & proj_mask == proj_value & proj_mask;
    let v: Complex64 = match &state.repr {
        // <ψ|Pσ|ψ> = Σ_b [b⊕x ∈ P] conj(ψ_{b⊕x}) phase(b) ψ_b
        Representation::Pure(a) => a
            .iter()
            .enumerate()
            .filter(|(b, _)| hit(*b))
            .map(|(b, amp)| a[b ^ x].conj() * act.phase(b) * amp)
            .sum(),
        Representation::Mixed(m) => (0..m.nrows())
            .filter(|&c| hit(c))
            .map(|c| act.phase(c) * m[(c, c ^ x)])
            .sum(),
    };
    Ok(p.coeff() * v.re)
}

/// Dense matrix `coeff · σ`.
pub fn pauli_matrix(p: &PauliString) -> Result<Operator> {
    check_cap("dense operator", DENSITY_CAP, p.n_qubits())?;
    let act = PauliAction::of(p);
    let dim = 1usize << p.n_qubits();
    let c = Complex64::new(p.coeff(), 0.0);
    let mut m = Operator::zeros(dim, dim);
    for b in 0..dim {
        m[(b ^ act.x as usize, b)] = c * act.phase(b);
    }
    Ok(m)
}

/// Dense matrix of `Σ_i c_i σ_i`.
pub fn pauli_sum_matrix(n: usize, terms: &[PauliString]) -> Result<Operator> {
    check_cap("dense operator", DENSITY_CAP, n)?;
    let dim = 1usize << n;
    let mut m = Operator::zeros(dim, dim);
    for t in terms {
        check_width(n, t.n_qubits())?;
        let act = PauliAction::of(t);
        let c = Complex64::new(t.coeff(), 0.0);
        for b in 0..dim {
            m[(b ^ act.x as usize, b)] += c * act.phase(b);
        }
    }
    Ok(m)
}

pub fn hermiticity_defect(m: &Operator) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Operator) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Sum of absolute eigenvalues (the trace norm) of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &Operator) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
