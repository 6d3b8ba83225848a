//! Bit-packed Pauli strings with a real coefficient.
//!
//! A string `c · σ_0 ⊗ σ_1 ⊗ … ⊗ σ_{N-1}` is stored as two bit vectors
//! (`x` and `z`), so `X = (1,0)`, `Z = (0,1)` and `Y = (1,1)`. Qubit 0 is the
//! leftmost tensor factor and the leftmost character of the text form. Since
//! every operator we decompose is Hermitian, the Hermitian `Y` is used
//! directly and no complex phase is stored.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, DROP_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    coeff: f64,
}

impl PauliString {
    /// `coeff · I^{⊗n}`.
    pub fn identity(n: usize, coeff: f64) -> Self {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            coeff,
        }
    }

    /// Single Pauli `p` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli, coeff: f64) -> Self {
        let mut s = Self::identity(n, coeff);
        s.set(qubit, p);
        s
    }

    pub fn from_paulis(paulis: &[Pauli], coeff: f64) -> Self {
        let mut s = Self::identity(paulis.len(), coeff);
        for (q, &p) in paulis.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Parses a label over `IXYZ`, e.g. `"XIZ"`.
    pub fn parse(label: &str, coeff: f64) -> Result<Self> {
        let paulis = label
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::invalid(format!("bad Pauli character {c:?} in {label:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if paulis.is_empty() {
            return Err(Error::invalid("empty Pauli label"));
        }
        Ok(Self::from_paulis(&paulis, coeff))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn set_coeff(&mut self, coeff: f64) {
        self.coeff = coeff;
    }

    pub fn with_coeff(mut self, coeff: f64) -> Self {
        self.coeff = coeff;
        self
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, q % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for width {}", self.n);
        let (x, z) = p.bits();
        self.set_bits(q, x, z);
    }

    pub fn paulis(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn label(&self) -> String {
        (0..self.n).map(|q| self.get(q).to_char()).collect()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    /// Equality of the operator part, ignoring the coefficient.
    pub fn same_axes(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((xa, za), (xb, zb))| ((xa & zb) ^ (za & xb)).count_ones())
            .sum();
        anti.is_multiple_of(2)
    }

    /// Product `self · other = i^k · c_a c_b · σ_c`, returned as `(k mod 4, σ_c)`
    /// with the coefficient of `σ_c` set to `c_a c_b`.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        assert_eq!(self.n, other.n, "width mismatch in Pauli product");
        let mut out = PauliString::identity(self.n, self.coeff * other.coeff);
        let mut phase: i64 = 0;
        for w in 0..self.x.len() {
            let (xa, za, xb, zb) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (xc, zc) = (xa ^ xb, za ^ zb);
            phase += (xa & za).count_ones() as i64 + (xb & zb).count_ones() as i64
                + 2 * (za & xb).count_ones() as i64
                - (xc & zc).count_ones() as i64;
            out.x[w] = xc;
            out.z[w] = zc;
        }
        (phase.rem_euclid(4) as u8, out)
    }

    /// Dense-index masks `(x, z)`: qubit `q` maps to bit `n-1-q` of a basis
    /// index, so qubit 0 is the most significant bit.
    pub fn dense_masks(&self) -> (u64, u64) {
        assert!(self.n <= 64, "dense masks need at most 64 qubits");
        let (mut xm, mut zm) = (0u64, 0u64);
        for q in 0..self.n {
            let bit = 1u64 << (self.n - 1 - q);
            if self.x_bit(q) {
                xm |= bit;
            }
            if self.z_bit(q) {
                zm |= bit;
            }
        }
        (xm, zm)
    }

    /// Builds a string from dense-index masks (inverse of [`dense_masks`]).
    ///
    /// [`dense_masks`]: PauliString::dense_masks
    pub fn from_dense_masks(n: usize, xm: u64, zm: u64, coeff: f64) -> Self {
        let mut s = Self::identity(n, coeff);
        for q in 0..n {
            let bit = 1u64 << (n - 1 - q);
            s.set_bits(q, xm & bit != 0, zm & bit != 0);
        }
        s
    }

    pub(crate) fn key(&self) -> (Vec<u64>, Vec<u64>) {
        (self.x.clone(), self.z.clone())
    }

    fn sort_key(&self) -> Vec<u8> {
        // I < X < Y < Z per qubit, qubit 0 most significant.
        (0..self.n)
            .map(|q| match self.get(q) {
                Pauli::I => 0,
                Pauli::X => 1,
                Pauli::Y => 2,
                Pauli::Z => 3,
            })
            .collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+} {}", self.coeff, self.label())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PauliString", 2)?;
        st.serialize_field("pauli", &self.label())?;
        st.serialize_field("coeff", &self.coeff())?;
        st.end()
    }
}

/// Accumulator that merges like strings by exact bit equality.
#[derive(Clone, Debug)]
pub struct PauliSum {
    n: usize,
    terms: HashMap<(Vec<u64>, Vec<u64>), PauliString>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum {
            n,
            terms: HashMap::new(),
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        let mut sum = PauliSum::new(n);
        for t in terms {
            sum.add(t)?;
        }
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, term: PauliString) -> Result<()> {
        if term.n != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: term.n,
            });
        }
        match self.terms.entry(term.key()) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let c = e.get().coeff + term.coeff;
                e.get_mut().coeff = c;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(term);
            }
        }
        Ok(())
    }

    /// Removes every term with `|c| <= threshold`.
    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, t| t.coeff.abs() > threshold);
    }

    /// Terms with `|c| > DROP_THRESHOLD`, in canonical label order.
    pub fn into_terms(mut self) -> Vec<PauliString> {
        self.prune(DROP_THRESHOLD);
        let mut v: Vec<PauliString> = self.terms.into_values().collect();
        v.sort_by_cached_key(|t| t.sort_key());
        v
    }
}

/// `Σ |c_i|` over the given terms.
pub fn l1_norm(terms: &[PauliString]) -> f64 {
    terms.iter().map(|t| t.coeff.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_label_round_trip() {
        let p = PauliString::parse("XIYZ", -0.5).unwrap();
        assert_eq!(p.label(), "XIYZ");
        assert_eq!(p.weight(), 3);
        assert_eq!(p.y_count(), 1);
        assert!(PauliString::parse("XQ", 1.0).is_err());
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliString::parse("X", 1.0).unwrap();
        let y = PauliString::parse("Y", 1.0).unwrap();
        let z = PauliString::parse("Z", 1.0).unwrap();
        // XY = iZ, YZ = iX, ZX = iY, YX = -iZ
        let (k, r) = x.mul(&y);
        assert_eq!((k, r.label()), (1, "Z".to_string()));
        let (k, r) = y.mul(&z);
        assert_eq!((k, r.label()), (1, "X".to_string()));
        let (k, r) = z.mul(&x);
        assert_eq!((k, r.label()), (1, "Y".to_string()));
        let (k, r) = y.mul(&x);
        assert_eq!((k, r.label()), (3, "Z".to_string()));
        let (k, r) = y.mul(&y);
        assert_eq!((k, r.label()), (0, "I".to_string()));
    }

    #[test]
    fn commutation() {
        let a = PauliString::parse("XX", 1.0).unwrap();
        let b = PauliString::parse("ZZ", 1.0).unwrap();
        let c = PauliString::parse("ZI", 1.0).unwrap();
        assert!(a.commutes_with(&b));
        assert!(!a.commutes_with(&c));
    }

    #[test]
    fn dense_masks_put_qubit_zero_first() {
        let p = PauliString::parse("XIZ", 1.0).unwrap();
        assert_eq!(p.dense_masks(), (0b100, 0b001));
        let back = PauliString::from_dense_masks(3, 0b100, 0b001, 1.0);
        assert!(back.same_axes(&p));
    }

    #[test]
    fn wide_strings_span_words() {
        let mut p = PauliString::identity(130, 1.0);
        p.set(0, Pauli::X);
        p.set(129, Pauli::Y);
        assert_eq!(p.get(129), Pauli::Y);
        assert_eq!(p.weight(), 2);
    }

    #[test]
    fn sum_merges_and_drops() {
        let mut s = PauliSum::new(2);
        s.add(PauliString::parse("XZ", 0.5).unwrap()).unwrap();
        s.add(PauliString::parse("XZ", -0.5).unwrap()).unwrap();
        s.add(PauliString::parse("II", 2.0).unwrap()).unwrap();
        s.add(PauliString::parse("ZI", 1.0).unwrap()).unwrap();
        let t = s.into_terms();
        let labels: Vec<_> = t.iter().map(|t| t.label()).collect();
        assert_eq!(labels, vec!["II", "ZI"]);
        assert!(PauliSum::new(2).add(PauliString::identity(3, 1.0)).is_err());
    }
}
