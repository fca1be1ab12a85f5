//! Pauli word algebra and the Jordan–Wigner transform.
//!
//! A [`PauliWord`] stores its letters as a pair of bitmasks (X-part and
//! Z-part), so `Y` is the letter with both bits set. Under this encoding the
//! word with masks `(x, z)` is `i^{|x & z|} X^x Z^z`, which makes products,
//! commutation checks and state-vector action a handful of popcounts.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients whose magnitude falls below this are removed when a
/// [`PauliSum`] is normalized.
pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-12;

const BLOCK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Letter::I),
            'X' => Ok(Letter::X),
            'Y' => Ok(Letter::Y),
            'Z' => Ok(Letter::Z),
            other => Err(Error::invalid(format!("invalid Pauli letter {other:?}"))),
        }
    }
}

/// A power of `i`: one of `+1, +i, -1, -i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// A tensor product of single-qubit Paulis on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn blocks(n: usize) -> usize {
    n.div_ceil(BLOCK).max(1)
}

fn popcount(v: &[u64]) -> u32 {
    v.iter().map(|b| b.count_ones()).sum()
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        PauliWord {
            n,
            x: vec![0; blocks(n)],
            z: vec![0; blocks(n)],
        }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut w = PauliWord::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            w.set(q, l);
        }
        w
    }

    /// Word with the given letters on the listed qubits and `I` elsewhere.
    pub fn from_sparse(n: usize, letters: &[(usize, Letter)]) -> Result<Self> {
        let mut w = PauliWord::identity(n);
        for &(q, l) in letters {
            if q >= n {
                return Err(Error::Dimension {
                    expected: n,
                    found: q + 1,
                });
            }
            w.set(q, l);
        }
        Ok(w)
    }

    pub fn single(n: usize, qubit: usize, letter: Letter) -> Result<Self> {
        Self::from_sparse(n, &[(qubit, letter)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letter(&self, q: usize) -> Letter {
        let (b, o) = (q / BLOCK, q % BLOCK);
        Letter::from_bits((self.x[b] >> o) & 1 == 1, (self.z[b] >> o) & 1 == 1)
    }

    fn set(&mut self, q: usize, l: Letter) {
        let (b, o) = (q / BLOCK, q % BLOCK);
        let (xb, zb) = l.bits();
        self.x[b] = (self.x[b] & !(1 << o)) | ((xb as u64) << o);
        self.z[b] = (self.z[b] & !(1 << o)) | ((zb as u64) << o);
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).map(|q| self.letter(q))
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&b| b == 0)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.letter(q) != Letter::I)
            .collect()
    }

    pub fn y_count(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones() as usize)
            .sum()
    }

    /// X-part as a single machine word. Only meaningful for `n <= 64`, which
    /// every state-vector consumer satisfies.
    pub fn x_bits(&self) -> u64 {
        debug_assert!(self.n <= BLOCK);
        self.x[0]
    }

    pub fn z_bits(&self) -> u64 {
        debug_assert!(self.n <= BLOCK);
        self.z[0]
    }

    fn check_dims(&self, other: &PauliWord) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Group product `self * other`, returned as `(phase, word)`.
    pub fn multiply(&self, other: &PauliWord) -> Result<(Phase, PauliWord)> {
        self.check_dims(other)?;
        let x: Vec<u64> = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z: Vec<u64> = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let y_self = popcount(&self.x.iter().zip(&self.z).map(|(a, b)| a & b).collect::<Vec<_>>());
        let y_other = popcount(&other.x.iter().zip(&other.z).map(|(a, b)| a & b).collect::<Vec<_>>());
        let y_out = popcount(&x.iter().zip(&z).map(|(a, b)| a & b).collect::<Vec<_>>());
        // Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}
        let swaps = popcount(&self.z.iter().zip(&other.x).map(|(a, b)| a & b).collect::<Vec<_>>());
        let exponent = y_self as i64 + y_other as i64 - y_out as i64 + 2 * swaps as i64;
        Ok((Phase::from_exponent(exponent), PauliWord { n: self.n, x, z }))
    }

    fn symplectic_parity(&self, other: &PauliWord) -> u32 {
        let mut count = 0;
        for b in 0..self.x.len() {
            count += ((self.x[b] & other.z[b]) ^ (self.z[b] & other.x[b])).count_ones();
        }
        count & 1
    }

    pub fn commutes(&self, other: &PauliWord) -> Result<bool> {
        self.check_dims(other)?;
        Ok(self.symplectic_parity(other) == 0)
    }

    /// True when every position carries equal letters or at least one `I`.
    pub fn qubit_wise_commutes(&self, other: &PauliWord) -> Result<bool> {
        self.check_dims(other)?;
        Ok((0..self.x.len()).all(|b| {
            let overlap = (self.x[b] | self.z[b]) & (other.x[b] | other.z[b]);
            let differ = (self.x[b] ^ other.x[b]) | (self.z[b] ^ other.z[b]);
            overlap & differ == 0
        }))
    }

    /// Action on a computational basis state: `P|k> = phase · |k'>`.
    /// Bit `q` of `k` is qubit `q`. Requires `n <= 64`.
    pub fn basis_action(&self, k: u64) -> (Phase, u64) {
        let (x, z) = (self.x[0], self.z[0]);
        let e = (x & z).count_ones() as i64 + 2 * (z & k).count_ones() as i64;
        (Phase::from_exponent(e), k ^ x)
    }

    pub(crate) fn x_blocks(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_blocks(&self) -> &[u64] {
        &self.z
    }
}

impl Ord for PauliWord {
    /// Lexicographic order of the letter string, reading from qubit 0, with
    /// `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for q in 0..self.n {
                match self.letter(q).cmp(&other.letter(q)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliWord({self})")
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    /// Parses a string such as `"XIZY"`; character `k` is the letter on qubit `k`.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::invalid("empty Pauli word"));
        }
        Ok(PauliWord::from_letters(&letters))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub word: PauliWord,
}

impl PauliTerm {
    pub fn new(coefficient: f64, word: PauliWord) -> Self {
        PauliTerm { coefficient, word }
    }
}

/// Real-weighted sum of distinct Pauli words with the identity component
/// kept separately as a scalar offset.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliTerm>,
    identity_offset: f64,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum {
            n,
            terms: Vec::new(),
            identity_offset: 0.0,
        }
    }

    /// Builds a normalized sum: duplicate words are combined in order of
    /// first appearance, identity words go to the offset, and coefficients
    /// below [`DEFAULT_DROP_TOLERANCE`] are dropped.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliWord)>,
    {
        Self::from_terms_with_tolerance(n, terms, DEFAULT_DROP_TOLERANCE)
    }

    pub fn from_terms_with_tolerance<I>(n: usize, terms: I, drop_tolerance: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliWord)>,
    {
        let mut offset = 0.0;
        let mut order: Vec<PauliWord> = Vec::new();
        let mut coeffs: HashMap<PauliWord, f64> = HashMap::new();
        for (c, w) in terms {
            if w.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: w.n(),
                });
            }
            if !c.is_finite() {
                return Err(Error::invalid(format!("non-finite coefficient on {w}")));
            }
            if w.is_identity() {
                offset += c;
                continue;
            }
            match coeffs.get_mut(&w) {
                Some(acc) => *acc += c,
                None => {
                    coeffs.insert(w.clone(), c);
                    order.push(w);
                }
            }
        }
        let terms = order
            .into_iter()
            .filter_map(|w| {
                let c = coeffs[&w];
                (c.abs() >= drop_tolerance).then(|| PauliTerm::new(c, w))
            })
            .collect();
        if offset.abs() < drop_tolerance {
            offset = 0.0;
        }
        Ok(PauliSum {
            n,
            terms,
            identity_offset: offset,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Non-identity terms.
    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn identity_offset(&self) -> f64 {
        self.identity_offset
    }

    /// Number of non-identity terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_identity_offset(mut self, offset: f64) -> Self {
        self.identity_offset = offset;
        self
    }

    pub fn coefficient_of(&self, word: &PauliWord) -> f64 {
        if word.is_identity() {
            return self.identity_offset;
        }
        self.terms
            .iter()
            .find(|t| &t.word == word)
            .map_or(0.0, |t| t.coefficient)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.abs())
            .fold(0.0, f64::max)
    }

    /// True when the dense matrix is real, i.e. every word has an even number of `Y`s.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.word.y_count() % 2 == 0)
    }

    pub fn scaled(&self, factor: f64) -> Result<PauliSum> {
        PauliSum::from_terms(
            self.n,
            self.terms
                .iter()
                .map(|t| (t.coefficient * factor, t.word.clone()))
                .chain(std::iter::once((
                    self.identity_offset * factor,
                    PauliWord::identity(self.n),
                ))),
        )
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        let id = PauliWord::identity(self.n);
        PauliSum::from_terms(
            self.n,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|t| (t.coefficient, t.word.clone()))
                .chain([
                    (self.identity_offset, id.clone()),
                    (other.identity_offset, id),
                ]),
        )
    }

    /// Same operator with the terms permuted by `order`, which must be a
    /// permutation of `0..len()`.
    pub fn reordered(&self, order: &[usize]) -> Result<PauliSum> {
        let mut seen = vec![false; self.terms.len()];
        if order.len() != self.terms.len() {
            return Err(Error::invalid("term ordering must be a permutation"));
        }
        for &i in order {
            if i >= seen.len() || seen[i] {
                return Err(Error::invalid("term ordering must be a permutation"));
            }
            seen[i] = true;
        }
        Ok(PauliSum {
            n: self.n,
            terms: order.iter().map(|&i| self.terms[i].clone()).collect(),
            identity_offset: self.identity_offset,
        })
    }
}

/// Complex-weighted Pauli sum. Intermediate form for fermionic products
/// before the Hermitian combination collapses the imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    n: usize,
    terms: Vec<(Complex64, PauliWord)>,
}

impl QubitOperator {
    pub fn identity(n: usize) -> Self {
        QubitOperator {
            n,
            terms: vec![(Complex64::new(1.0, 0.0), PauliWord::identity(n))],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Complex64, PauliWord)] {
        &self.terms
    }

    fn from_unmerged(n: usize, raw: Vec<(Complex64, PauliWord)>) -> Self {
        let mut index: HashMap<PauliWord, usize> = HashMap::new();
        let mut terms: Vec<(Complex64, PauliWord)> = Vec::new();
        for (c, w) in raw {
            match index.get(&w) {
                Some(&i) => terms[i].0 += c,
                None => {
                    index.insert(w.clone(), terms.len());
                    terms.push((c, w));
                }
            }
        }
        terms.retain(|(c, _)| c.norm() >= DEFAULT_DROP_TOLERANCE);
        QubitOperator { n, terms }
    }

    pub fn multiply(&self, other: &QubitOperator) -> Result<QubitOperator> {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ca, wa) in &self.terms {
            for (cb, wb) in &other.terms {
                let (phase, w) = wa.multiply(wb)?;
                raw.push((ca * cb * phase.to_complex(), w));
            }
        }
        Ok(QubitOperator::from_unmerged(self.n, raw))
    }

    pub fn scale(&self, factor: Complex64) -> QubitOperator {
        QubitOperator {
            n: self.n,
            terms: self.terms.iter().map(|(c, w)| (c * factor, w.clone())).collect(),
        }
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a QubitOperator>>(n: usize, ops: I) -> QubitOperator {
        let raw = ops
            .into_iter()
            .flat_map(|op| op.terms.iter().cloned())
            .collect();
        QubitOperator::from_unmerged(n, raw)
    }

    /// Converts to a real [`PauliSum`], failing if any imaginary part exceeds
    /// `tolerance` (the operator would not be Hermitian).
    pub fn into_hermitian(self, tolerance: f64) -> Result<PauliSum> {
        if let Some((c, w)) = self.terms.iter().find(|(c, _)| c.im.abs() > tolerance) {
            return Err(Error::NonHermitian(format!(
                "coefficient {c} on {w} has an imaginary part"
            )));
        }
        PauliSum::from_terms(self.n, self.terms.into_iter().map(|(c, w)| (c.re, w)))
    }
}

/// Product of fermionic ladder operators with a real weight. Each factor is
/// `(mode, dagger)`; factors multiply left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coefficient: f64,
    factors: Vec<(usize, bool)>,
}

impl FermionTerm {
    pub const MAX_FACTORS: usize = 4;

    pub fn new(coefficient: f64, factors: Vec<(usize, bool)>) -> Result<Self> {
        if factors.len() > Self::MAX_FACTORS {
            return Err(Error::invalid(format!(
                "fermion terms are limited to {} factors, got {}",
                Self::MAX_FACTORS,
                factors.len()
            )));
        }
        if !coefficient.is_finite() {
            return Err(Error::invalid("non-finite fermion coefficient"));
        }
        Ok(FermionTerm {
            coefficient,
            factors,
        })
    }

    /// `c a†_i a_i`
    pub fn number(coefficient: f64, i: usize) -> Self {
        FermionTerm {
            coefficient,
            factors: vec![(i, true), (i, false)],
        }
    }

    /// `c a†_i a_j`
    pub fn hop(coefficient: f64, i: usize, j: usize) -> Self {
        FermionTerm {
            coefficient,
            factors: vec![(i, true), (j, false)],
        }
    }

    /// `c a†_i a_i a†_j a_j`
    pub fn density_density(coefficient: f64, i: usize, j: usize) -> Self {
        FermionTerm {
            coefficient,
            factors: vec![(i, true), (i, false), (j, true), (j, false)],
        }
    }

    pub fn factors(&self) -> &[(usize, bool)] {
        &self.factors
    }
}

/// `a_j` (or `a†_j`) under `a_j = (X_j + iY_j)/2 · Z_0 … Z_{j-1}`.
fn ladder(mode: usize, dagger: bool, n_modes: usize) -> Result<QubitOperator> {
    if mode >= n_modes {
        return Err(Error::ModeIndex {
            index: mode,
            n_modes,
        });
    }
    let mut xs = vec![Letter::I; n_modes];
    for l in xs.iter_mut().take(mode) {
        *l = Letter::Z;
    }
    let mut ys = xs.clone();
    xs[mode] = Letter::X;
    ys[mode] = Letter::Y;
    let sign = if dagger { -0.5 } else { 0.5 };
    Ok(QubitOperator {
        n: n_modes,
        terms: vec![
            (Complex64::new(0.5, 0.0), PauliWord::from_letters(&xs)),
            (Complex64::new(0.0, sign), PauliWord::from_letters(&ys)),
        ],
    })
}

/// Qubit image of a single fermionic term. The result is complex in general;
/// only Hermitian combinations collapse to a real sum.
pub fn jordan_wigner_term(term: &FermionTerm, n_modes: usize) -> Result<QubitOperator> {
    let mut acc = QubitOperator::identity(n_modes);
    for &(mode, dagger) in &term.factors {
        acc = acc.multiply(&ladder(mode, dagger, n_modes)?)?;
    }
    Ok(acc.scale(Complex64::new(term.coefficient, 0.0)))
}

/// Qubit Hamiltonian of a Hermitian combination of fermionic terms.
pub fn jordan_wigner(terms: &[FermionTerm], n_modes: usize) -> Result<PauliSum> {
    let images = terms
        .iter()
        .map(|t| jordan_wigner_term(t, n_modes))
        .collect::<Result<Vec<_>>>()?;
    QubitOperator::sum(n_modes, &images).into_hermitian(1e-10)
}
