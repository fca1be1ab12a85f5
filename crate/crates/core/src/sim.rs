//! Dense state-vector simulation.
//!
//! Amplitude index bit `q` is the computational value of qubit `q`.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::io;
use crate::linalg::{self, Eigensystem};
use crate::pauli::{PauliSum, PauliWord};

/// Largest allowed deviation of `‖ψ‖²` from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!(
            "amplitude count {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

impl StateVector {
    /// `|0…0>` on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        linalg::check_dense_cap(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let s = StateVector { n, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(StateVector {
            n,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other.n)?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::Dimension {
                expected: self.n,
                found: n,
            });
        }
        Ok(())
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn apply_single(amps: &mut [Complex64], q: usize, m: &[[Complex64; 2]; 2]) {
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a0, a1) = (amps[i], amps[i | bit]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

pub(crate) fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let (c, t) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if i & c != 0 && i & t == 0 {
            amps.swap(i, i | t);
        }
    }
}

pub(crate) fn apply_gates(amps: &mut [Complex64], c: &Circuit) {
    for g in c.gates() {
        match g {
            Gate::U { qubit, matrix } => apply_single(amps, *qubit, matrix),
            Gate::Cnot { control, target } => apply_cnot(amps, *control, *target),
        }
    }
    if c.global_phase() != 0.0 {
        let p = Complex64::from_polar(1.0, c.global_phase());
        amps.iter_mut().for_each(|a| *a *= p);
    }
}

pub fn apply_circuit(s: &StateVector, c: &Circuit) -> Result<StateVector> {
    s.check_dim(c.n())?;
    let mut amps = s.amps.clone();
    apply_gates(&mut amps, c);
    Ok(StateVector { n: s.n, amps })
}

/// Dense unitary of a circuit, built column by column.
pub fn circuit_unitary(c: &Circuit) -> Result<DMatrix<Complex64>> {
    linalg::check_dense_cap(c.n())?;
    let dim = 1usize << c.n();
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    let mut col = vec![ZERO; dim];
    for k in 0..dim {
        col.iter_mut().for_each(|a| *a = ZERO);
        col[k] = Complex64::new(1.0, 0.0);
        apply_gates(&mut col, c);
        for (r, a) in col.iter().enumerate() {
            u[(r, k)] = *a;
        }
    }
    Ok(u)
}

/// `acc += coefficient · P |psi>`.
pub(crate) fn accumulate_word(acc: &mut [Complex64], word: &PauliWord, coefficient: Complex64, psi: &[Complex64]) {
    let (x, z) = (word.x_bits() as usize, word.z_bits() as usize);
    let base = crate::pauli::Phase::from_exponent(word.y_count() as i64).to_complex() * coefficient;
    for (k, &a) in psi.iter().enumerate() {
        let v = base * a;
        if (z & k).count_ones() % 2 == 0 {
            acc[k ^ x] += v;
        } else {
            acc[k ^ x] -= v;
        }
    }
}

/// `H |psi>` as raw amplitudes.
pub fn apply_pauli_sum(h: &PauliSum, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    if psi.len() != 1usize << h.n() {
        return Err(Error::Dimension {
            expected: 1usize << h.n(),
            found: psi.len(),
        });
    }
    let off = h.identity_offset();
    let mut out: Vec<Complex64> = psi.iter().map(|a| a * off).collect();
    for t in h.terms() {
        accumulate_word(&mut out, &t.word, Complex64::new(t.coefficient, 0.0), psi);
    }
    Ok(out)
}

pub fn expectation(s: &StateVector, h: &PauliSum) -> Result<f64> {
    s.check_dim(h.n())?;
    let hpsi = apply_pauli_sum(h, &s.amps)?;
    Ok(inner(&s.amps, &hpsi).re)
}

pub fn pauli_expectation(s: &StateVector, word: &PauliWord) -> Result<f64> {
    s.check_dim(word.n())?;
    let mut out = vec![ZERO; s.dim()];
    accumulate_word(&mut out, word, Complex64::new(1.0, 0.0), &s.amps);
    Ok(inner(&s.amps, &out).re)
}

/// Exact propagator `exp(-iHt)` from a cached eigendecomposition.
#[derive(Clone, Debug)]
pub struct Propagator {
    n: usize,
    eig: Eigensystem,
}

impl Propagator {
    pub fn new(h: &PauliSum) -> Result<Self> {
        Ok(Propagator {
            n: h.n(),
            eig: linalg::eigensystem(h)?,
        })
    }

    pub fn eigensystem(&self) -> &Eigensystem {
        &self.eig
    }

    pub fn evolve(&self, t: f64, s: &StateVector) -> Result<StateVector> {
        s.check_dim(self.n)?;
        let v = &self.eig.vectors;
        let psi = nalgebra::DVector::from_column_slice(&s.amps);
        let mut coeffs = v.ad_mul(&psi);
        for (c, e) in coeffs.iter_mut().zip(&self.eig.values) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = v * coeffs;
        Ok(StateVector {
            n: self.n,
            amps: out.iter().copied().collect(),
        })
    }
}

pub fn exact_evolve(h: &PauliSum, t: f64, s: &StateVector) -> Result<StateVector> {
    Propagator::new(h)?.evolve(t, s)
}

/// Lowest eigenpair. For a degenerate ground space this is the first vector
/// returned by the eigensolver after a stable ascending sort.
pub fn ground_state(h: &PauliSum) -> Result<(f64, StateVector)> {
    let eig = linalg::eigensystem(h)?;
    let state = StateVector::normalized(eig.vector(0))?;
    Ok((eig.values[0], state))
}

/// `sqrt(γ²)·ψ0 + sqrt(1-γ²)·χ` with `χ` a seeded Gaussian direction
/// orthogonal to `ψ0`.
pub fn overlap_state(ground: &StateVector, overlap_sq: f64, seed: u64) -> Result<StateVector> {
    if !(overlap_sq > 0.0 && overlap_sq <= 1.0) {
        return Err(Error::invalid(format!(
            "overlap must lie in (0, 1], got {overlap_sq}"
        )));
    }
    ground.check_normalized()?;
    if overlap_sq == 1.0 {
        return Ok(ground.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r: Vec<Complex64> = (0..ground.dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    // two Gram-Schmidt passes keep the residual overlap at roundoff level
    for _ in 0..2 {
        let proj = inner(&ground.amps, &r);
        for (x, g) in r.iter_mut().zip(&ground.amps) {
            *x -= proj * g;
        }
    }
    let chi = StateVector::normalized(r)?;
    let (a, b) = (overlap_sq.sqrt(), (1.0 - overlap_sq).sqrt());
    let amps = ground
        .amps
        .iter()
        .zip(&chi.amps)
        .map(|(g, c)| g * a + c * b)
        .collect();
    StateVector::normalized(amps)
}

pub fn prepare_overlap_state(h: &PauliSum, overlap_sq: f64, seed: u64) -> Result<StateVector> {
    let (_, ground) = ground_state(h)?;
    overlap_state(&ground, overlap_sq, seed)
}

const QSV_MAGIC: &str = "QSV1";

/// `QSV1 <n>\n` followed by `2^n` little-endian `(re, im)` f64 pairs.
pub fn state_to_bytes(s: &StateVector) -> Vec<u8> {
    let mut out = format!("{QSV_MAGIC} {}\n", s.n).into_bytes();
    for a in &s.amps {
        out.extend_from_slice(&a.re.to_le_bytes());
        out.extend_from_slice(&a.im.to_le_bytes());
    }
    out
}

pub fn state_from_bytes(bytes: &[u8]) -> Result<StateVector> {
    let bad = |msg: &str| Error::Parse {
        line: 1,
        msg: msg.to_string(),
    };
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing QSV1 header"))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| bad("header is not UTF-8"))?;
    let n: usize = header
        .strip_prefix(QSV_MAGIC)
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| bad("expected `QSV1 <n>` header"))?;
    linalg::check_dense_cap(n)?;
    let body = &bytes[nl + 1..];
    let dim = 1usize << n;
    if body.len() != dim * 16 {
        return Err(bad("payload length does not match the qubit count"));
    }
    let amps = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    StateVector::from_amplitudes(amps)
}

pub fn save_state(s: &StateVector, path: impl AsRef<Path>) -> Result<()> {
    io::write_atomic(path, &state_to_bytes(s))
}

pub fn load_state(path: impl AsRef<Path>) -> Result<StateVector> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    state_from_bytes(&bytes)
}
