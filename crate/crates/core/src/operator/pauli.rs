use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Operator, C64};
use crate::error::{Error, Result};

/// Largest register handled by the dense routines.
pub const MAX_QUBITS: usize = 10;

/// Single-qubit Pauli factor. The derive order gives the lexicographic order `I < X < Y < Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn phases(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }
}

/// Tensor product of Pauli factors; the first letter acts on qubit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliWord(Vec<Pauli>);

impl PauliWord {
    pub fn new(factors: Vec<Pauli>) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_QUBITS {
            let s: String = factors.iter().map(|p| p.as_char()).collect();
            return Err(Error::InvalidPauliWord(s));
        }
        Ok(Self(factors))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n])
    }

    /// `p` on `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, p: Pauli) -> Result<Self> {
        let mut w = vec![Pauli::I; n];
        *w.get_mut(site)
            .ok_or_else(|| Error::InvalidParameter(format!("site {site} out of range for {n} qubits")))? = p;
        Self::new(w)
    }

    /// Word with the given factors placed on the given sites.
    pub fn with_factors(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut w = vec![Pauli::I; n];
        for &(site, p) in factors {
            *w.get_mut(site).ok_or_else(|| {
                Error::InvalidParameter(format!("site {site} out of range for {n} qubits"))
            })? = p;
        }
        Self::new(w)
    }

    /// Word number `index` in lexicographic order among all words on `n` qubits.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self(
            (0..n)
                .map(|q| Pauli::from_index(index >> (2 * (n - 1 - q))))
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, p| (acc << 2) | p.index())
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.0
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Bit masks `(x, z)` over basis indices: `x` marks flipped qubits, `z` marks phased qubits.
    pub fn masks(&self) -> (usize, usize) {
        let n = self.0.len();
        let mut x = 0;
        let mut z = 0;
        for (q, p) in self.0.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            if p.flips() {
                x |= bit;
            }
            if p.phases() {
                z |= bit;
            }
        }
        (x, z)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidPauliWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors).map_err(|_| Error::InvalidPauliWord(s.to_string()))
    }
}

impl TryFrom<String> for PauliWord {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliWord> for String {
    fn from(w: PauliWord) -> String {
        w.to_string()
    }
}

/// Weighted Pauli word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub word: PauliWord,
    pub coeff: C64,
}

impl PauliString {
    pub fn new(word: PauliWord, coeff: C64) -> Self {
        Self { word, coeff }
    }

    pub fn to_operator(&self) -> Operator {
        pauli_matrix(&self.word)
            .expect("words are validated on construction")
            .scale(self.coeff)
    }
}

/// `i^k`.
fn i_pow(k: u32) -> C64 {
    match k & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Phase of `P|j>`, which equals `phase * |j ^ x>` with `Y = i X Z`.
#[inline]
fn word_phase(x: usize, z: usize, j: usize) -> C64 {
    let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    i_pow((x & z).count_ones()) * sign
}

/// Dense matrix of a Pauli word.
pub fn pauli_matrix(word: &PauliWord) -> Result<Operator> {
    let n = word.num_qubits();
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidPauliWord(word.to_string()));
    }
    let d = 1usize << n;
    let (x, z) = word.masks();
    let mut op = Operator::zeros(d);
    let m = op.matrix_mut();
    for j in 0..d {
        m[(j ^ x, j)] = word_phase(x, z, j);
    }
    Ok(op)
}

/// Sum of weighted Pauli words on a common register.
pub fn pauli_sum(terms: &[PauliString]) -> Result<Operator> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty Pauli sum".into()))?;
    let n = first.word.num_qubits();
    let d = 1usize << n;
    let mut op = Operator::zeros(d);
    for t in terms {
        if t.word.num_qubits() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: t.word.num_qubits(),
            });
        }
        let (x, z) = t.word.masks();
        let m = op.matrix_mut();
        for j in 0..d {
            m[(j ^ x, j)] += t.coeff * word_phase(x, z, j);
        }
    }
    Ok(op)
}

/// In-place unnormalised Walsh-Hadamard transform: `out[z] = sum_j (-1)^{|j & z|} v[j]`.
fn walsh_hadamard(v: &mut [C64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// All `4^N` coefficients `Tr[P_w^dagger M] / d`, indexed by [`PauliWord::index`].
pub fn pauli_coefficients(op: &Operator) -> Vec<C64> {
    let d = op.dim();
    let m = op.matrix();
    let n = op.num_qubits();
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    let mut v = vec![C64::new(0.0, 0.0); d];
    let inv_d = 1.0 / d as f64;
    for x in 0..d {
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = m[(j ^ x, j)];
        }
        walsh_hadamard(&mut v);
        for (z, s) in v.iter().enumerate() {
            let coeff = i_pow((x & z).count_ones()).conj() * s * inv_d;
            out[interleave(n, x, z)] = coeff;
        }
    }
    out
}

/// Word index of the word whose flip and phase masks are `x` and `z`.
fn interleave(n: usize, x: usize, z: usize) -> usize {
    let mut idx = 0;
    for q in 0..n {
        let bit = n - 1 - q;
        let xb = (x >> bit) & 1;
        let zb = (z >> bit) & 1;
        let p = match (xb, zb) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        };
        idx = (idx << 2) | p;
    }
    idx
}

/// Nonzero Pauli components of `op`, in lexicographic word order.
///
/// Components with `|coeff| <= tol` are dropped.
pub fn pauli_decompose(op: &Operator, tol: f64) -> Vec<PauliString> {
    let n = op.num_qubits();
    pauli_coefficients(op)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > tol)
        .map(|(i, c)| PauliString::new(PauliWord::from_index(n, i), c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{im, re};

    fn w(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_matrices() {
        let y = pauli_matrix(&w("Y")).unwrap();
        assert_eq!(y.get(0, 1), im(-1.0));
        assert_eq!(y.get(1, 0), im(1.0));
        let z = pauli_matrix(&w("Z")).unwrap();
        assert_eq!(z.get(0, 0), re(1.0));
        assert_eq!(z.get(1, 1), re(-1.0));
    }

    #[test]
    fn word_matrix_matches_kron() {
        for s in ["XY", "ZI", "YZX", "IYZ", "YYY"] {
            let word = w(s);
            let kron = word
                .factors()
                .iter()
                .map(|p| pauli_matrix(&PauliWord::new(vec![*p]).unwrap()).unwrap())
                .reduce(|a, b| a.kron(&b))
                .unwrap();
            let direct = pauli_matrix(&word).unwrap();
            assert!(kron.max_abs_diff(&direct).unwrap() < 1e-15, "{s}");
        }
    }

    #[test]
    fn parse_rejects_bad_words() {
        assert!("XQ".parse::<PauliWord>().is_err());
        assert!("".parse::<PauliWord>().is_err());
        assert!("IIIIIIIIIII".parse::<PauliWord>().is_err());
    }

    #[test]
    fn index_roundtrip_and_order() {
        let words: Vec<PauliWord> = (0..16).map(|i| PauliWord::from_index(2, i)).collect();
        assert_eq!(words[0].to_string(), "II");
        assert_eq!(words[6].to_string(), "XY");
        assert!(words.windows(2).all(|p| p[0] < p[1]));
        for (i, word) in words.iter().enumerate() {
            assert_eq!(word.index(), i);
        }
    }

    #[test]
    fn decompose_finds_single_word() {
        let op = pauli_matrix(&w("IXZY")).unwrap().scale(C64::new(0.3, -0.2));
        let terms = pauli_decompose(&op, 1e-12);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].word, w("IXZY"));
        assert!((terms[0].coeff - C64::new(0.3, -0.2)).norm() < 1e-15);
    }

    #[test]
    fn decompose_roundtrip_on_dense_matrix() {
        let d = 8;
        let op = Operator::from_fn(d, |r, c| C64::new((r * 7 + c * 3) as f64 % 5.0, (r + 2 * c) as f64 % 3.0));
        let terms = pauli_decompose(&op, 0.0);
        let rebuilt = pauli_sum(&terms).unwrap();
        assert!(rebuilt.max_abs_diff(&op).unwrap() < 1e-13);
    }
}
