//! Benchmark Hamiltonians, the Pauli text format and dense spectra.
//!
//! The text format is line based:
//!
//! ```text
//! # comment
//! qubits 2
//! 5.0000000000000000e-1 XX
//! -2.5000000000000000e-1 ZI
//! ```
//!
//! Character `k` of a word is the letter on qubit `k`. An all-`I` word
//! contributes to the identity offset.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::linalg;
use crate::pauli::{jordan_wigner, FermionTerm, PauliSum, PauliWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
}

/// Spinless Hubbard model on an `nx × ny` rectangular lattice.
///
/// `H = -t Σ_<ij> (a†_i a_j + a†_j a_i) + U Σ_<ij> n_i n_j - μ Σ_i n_i`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardSpec {
    pub nx: usize,
    pub ny: usize,
    pub t: f64,
    pub u: f64,
    pub mu: f64,
    pub boundary: Boundary,
}

impl HubbardSpec {
    pub fn new(nx: usize, ny: usize, t: f64, u: f64, mu: f64) -> Self {
        HubbardSpec {
            nx,
            ny,
            t,
            u,
            mu,
            boundary: Boundary::Open,
        }
    }

    /// `t = 1, U = 4, μ = 0`.
    pub fn with_defaults(nx: usize, ny: usize) -> Self {
        Self::new(nx, ny, 1.0, 4.0, 0.0)
    }

    pub fn n_sites(&self) -> usize {
        self.nx * self.ny
    }

    /// Site `(ix, iy)` maps to qubit `ix * ny + iy`.
    pub fn site(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    /// Nearest-neighbour pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                let s = self.site(ix, iy);
                if iy + 1 < self.ny {
                    edges.push((s, self.site(ix, iy + 1)));
                }
                if ix + 1 < self.nx {
                    edges.push((s, self.site(ix + 1, iy)));
                }
            }
        }
        edges
    }

    fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::invalid("lattice extents must be at least 1"));
        }
        if !(self.t.is_finite() && self.u.is_finite() && self.mu.is_finite()) {
            return Err(Error::invalid("Hubbard parameters must be finite"));
        }
        Ok(())
    }
}

pub fn hubbard_fermion_terms(spec: &HubbardSpec) -> Vec<FermionTerm> {
    let edges = spec.edges();
    let mut terms = Vec::new();
    for &(i, j) in &edges {
        terms.push(FermionTerm::hop(-spec.t, i, j));
        terms.push(FermionTerm::hop(-spec.t, j, i));
    }
    for &(i, j) in &edges {
        terms.push(FermionTerm::density_density(spec.u, i, j));
    }
    for i in 0..spec.n_sites() {
        terms.push(FermionTerm::number(-spec.mu, i));
    }
    terms
}

pub fn build_hubbard(spec: &HubbardSpec) -> Result<PauliSum> {
    spec.validate()?;
    jordan_wigner(&hubbard_fermion_terms(spec), spec.n_sites())
}

pub fn parse_pauli_text(text: &str) -> Result<PauliSum> {
    let mut n: Option<usize> = None;
    let mut terms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (first, second) = (fields.next(), fields.next());
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected two fields".into(),
            });
        }
        let Some(n_qubits) = n else {
            if first != Some("qubits") {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected header `qubits <n>`".into(),
                });
            }
            let count = second.and_then(|s| s.parse::<usize>().ok()).ok_or(Error::Parse {
                line: line_no,
                msg: "qubit count must be a non-negative integer".into(),
            })?;
            if count == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "qubit count must be at least 1".into(),
                });
            }
            n = Some(count);
            continue;
        };
        let (Some(coeff), Some(word)) = (first, second) else {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected `<coefficient> <word>`".into(),
            });
        };
        let c: f64 = coeff.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad coefficient {coeff:?}"),
        })?;
        if !c.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("non-finite coefficient {coeff:?}"),
            });
        }
        let w: PauliWord = word.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad Pauli word {word:?}"),
        })?;
        if w.n() != n_qubits {
            return Err(Error::WordLength {
                line: line_no,
                expected: n_qubits,
                found: w.n(),
            });
        }
        terms.push((c, w));
    }
    let n = n.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing `qubits <n>` header".into(),
    })?;
    PauliSum::from_terms(n, terms)
}

pub fn to_pauli_text(h: &PauliSum) -> String {
    let mut out = format!("qubits {}\n", h.n());
    if h.identity_offset() != 0.0 {
        let _ = writeln!(out, "{:.16e} {}", h.identity_offset(), PauliWord::identity(h.n()));
    }
    for t in h.terms() {
        let _ = writeln!(out, "{:.16e} {}", t.coefficient, t.word);
    }
    out
}

pub fn load_pauli_file(path: impl AsRef<Path>) -> Result<PauliSum> {
    parse_pauli_text(&io::read_to_string(path)?)
}

pub fn save_pauli_file(h: &PauliSum, path: impl AsRef<Path>) -> Result<()> {
    io::write_atomic(path, to_pauli_text(h).as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralInfo {
    pub e0: f64,
    /// Lowest eigenvalue strictly above `e0` (beyond a relative tolerance of
    /// 1e-9); equals `e0` when the spectrum is flat.
    pub e1: f64,
    pub emax: f64,
    pub norm2: f64,
}

impl SpectralInfo {
    pub fn from_sorted(values: &[f64]) -> Self {
        let e0 = values[0];
        let emax = *values.last().unwrap_or(&e0);
        let tol = 1e-9 * e0.abs().max(emax.abs()).max(1.0);
        let e1 = values.iter().copied().find(|&v| v > e0 + tol).unwrap_or(e0);
        SpectralInfo {
            e0,
            e1,
            emax,
            norm2: e0.abs().max(emax.abs()),
        }
    }

    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }

    pub fn width(&self) -> f64 {
        self.emax - self.e0
    }
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub info: SpectralInfo,
    pub eigenvalues: Vec<f64>,
}

pub fn dense_spectrum(h: &PauliSum) -> Result<Spectrum> {
    let eigenvalues = match linalg::pauli_sum_matrix_real(h)? {
        Some(m) => {
            let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        }
        None => linalg::hermitian_eigenvalues(linalg::pauli_sum_matrix(h)?),
    };
    Ok(Spectrum {
        info: SpectralInfo::from_sorted(&eigenvalues),
        eigenvalues,
    })
}

/// Triangle-inequality bound `|offset| + Σ|h_i| ≥ ||H||₂`.
pub fn norm_upper_bound(h: &PauliSum) -> f64 {
    h.identity_offset().abs() + h.terms().iter().map(|t| t.coefficient.abs()).sum::<f64>()
}

/// Spectral norm from the dense spectrum when `n` is within the dense cap,
/// else [`norm_upper_bound`]. The flag is true when the exact norm was used.
pub fn spectral_norm_or_bound(h: &PauliSum) -> (f64, bool) {
    match dense_spectrum(h) {
        Ok(s) => (s.info.norm2, true),
        Err(_) => (norm_upper_bound(h), false),
    }
}
