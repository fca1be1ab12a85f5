//! Dense matrices of Pauli sums and sorted Hermitian eigendecompositions.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Largest qubit count handled by dense routines unless overridden.
pub const DEFAULT_DENSE_CAP: usize = 14;

/// Dense qubit cap, read from `QRE_DENSE_CAP` when set to a valid integer.
pub fn dense_cap() -> usize {
    std::env::var("QRE_DENSE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

pub fn check_dense_cap(n: usize) -> Result<()> {
    let cap = dense_cap().min(30);
    if n > cap {
        return Err(Error::Capability { n, cap });
    }
    Ok(())
}

/// Dense complex matrix of `h`, identity offset included.
pub fn pauli_sum_matrix(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    check_dense_cap(h.n())?;
    let dim = 1usize << h.n();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim {
        m[(k, k)] += Complex64::new(h.identity_offset(), 0.0);
    }
    for term in h.terms() {
        for k in 0..dim {
            let (phase, row) = term.word.basis_action(k as u64);
            m[(row as usize, k)] += phase.to_complex() * term.coefficient;
        }
    }
    Ok(m)
}

/// Dense real matrix of `h`; `None` when some word has an odd number of `Y`s.
pub fn pauli_sum_matrix_real(h: &PauliSum) -> Result<Option<DMatrix<f64>>> {
    check_dense_cap(h.n())?;
    if !h.is_real() {
        return Ok(None);
    }
    let dim = 1usize << h.n();
    let mut m = DMatrix::<f64>::from_diagonal_element(dim, dim, h.identity_offset());
    for term in h.terms() {
        for k in 0..dim {
            let (phase, row) = term.word.basis_action(k as u64);
            m[(row as usize, k)] += phase.to_complex().re * term.coefficient;
        }
    }
    Ok(Some(m))
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors as
/// the matching columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i).iter().copied().collect()
    }
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

pub fn symmetric_eigen(m: DMatrix<f64>) -> Eigensystem {
    let dim = m.nrows();
    let eig = SymmetricEigen::new(m);
    let order = ascending_order(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| {
        Complex64::new(eig.eigenvectors[(r, order[c])], 0.0)
    });
    Eigensystem { values, vectors }
}

pub fn hermitian_eigen(m: DMatrix<Complex64>) -> Eigensystem {
    let dim = m.nrows();
    let eig = SymmetricEigen::new(m);
    let order = ascending_order(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigensystem { values, vectors }
}

/// Full eigendecomposition of `h`, taking the real path when possible.
pub fn eigensystem(h: &PauliSum) -> Result<Eigensystem> {
    match pauli_sum_matrix_real(h)? {
        Some(m) => Ok(symmetric_eigen(m)),
        None => Ok(hermitian_eigen(pauli_sum_matrix(h)?)),
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Operator 2-norm (largest singular value).
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().max()
}
