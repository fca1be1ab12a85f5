//! Test-side oracles. Dense matrices here are built from Kronecker products
//! of 2×2 blocks, independently of the library's bitmask arithmetic.
#![allow(dead_code)]

use nalgebra::DMatrix;
use qre_core::hamlib::{build_hubbard, HubbardSpec};
use qre_core::pauli::{PauliSum, PauliWord};
use qre_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn letter_matrix(l: char) -> CMat {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match l {
        'I' => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad letter {l}"),
    }
}

/// Character `k` acts on qubit `k`, which is bit `k` of the basis index, so
/// the matrix is `P_{n-1} ⊗ … ⊗ P_0`.
pub fn word_matrix(word: &str) -> CMat {
    let mut m = CMat::from_element(1, 1, c(1.0, 0.0));
    for l in word.chars() {
        m = letter_matrix(l).kronecker(&m);
    }
    m
}

pub fn sum_matrix(h: &PauliSum) -> CMat {
    let dim = 1usize << h.n();
    let mut m = CMat::identity(dim, dim) * c(h.identity_offset(), 0.0);
    for t in h.terms() {
        m += word_matrix(&t.word.to_string()) * c(t.coefficient, 0.0);
    }
    m
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn op_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().fold(0.0, |a: f64, &b| a.max(b))
}

/// `exp(-iθP) = cos θ·I - i sin θ·P` for a Pauli word.
pub fn pauli_exp(word: &str, theta: f64) -> CMat {
    let p = word_matrix(word);
    let dim = p.nrows();
    CMat::identity(dim, dim) * c(theta.cos(), 0.0) - p * c(0.0, theta.sin())
}

/// Dense `exp(-iHt)` through the eigendecomposition of the oracle matrix.
pub fn expm_hermitian(m: &CMat, t: f64) -> CMat {
    let e = m.clone().symmetric_eigen();
    let d = CMat::from_diagonal(&e.eigenvalues.map(|x| Complex64::from_polar(1.0, -x * t)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

pub fn sum(n: usize, terms: &[(f64, &str)]) -> PauliSum {
    PauliSum::from_terms(n, terms.iter().map(|(c, w)| (*c, w.parse::<PauliWord>().unwrap()))).unwrap()
}

pub fn hubbard(nx: usize, ny: usize) -> PauliSum {
    build_hubbard(&HubbardSpec::with_defaults(nx, ny)).unwrap()
}

pub fn random_word(rng: &mut impl Rng, n: usize) -> String {
    (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect()
}

/// Random real combination of up to `max_terms` distinct non-identity words.
pub fn random_sum(seed: u64, n: usize, max_terms: usize) -> PauliSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=max_terms);
    let mut terms = Vec::new();
    while terms.len() < m {
        let w = random_word(&mut rng, n);
        if w.chars().all(|l| l == 'I') {
            continue;
        }
        terms.push((rng.gen_range(-2.0..2.0), w.parse::<PauliWord>().unwrap()));
    }
    PauliSum::from_terms(n, terms).unwrap()
}

fn chain(n: usize, f: impl Fn(usize) -> Vec<(f64, String)>) -> PauliSum {
    let terms: Vec<(f64, PauliWord)> = (0..n)
        .flat_map(&f)
        .map(|(c, w)| (c, w.parse::<PauliWord>().unwrap()))
        .collect();
    PauliSum::from_terms(n, terms).unwrap()
}

fn two_site(n: usize, i: usize, a: char, b: char) -> String {
    (0..n)
        .map(|k| if k == i { a } else if k == i + 1 { b } else { 'I' })
        .collect()
}

fn one_site(n: usize, i: usize, a: char) -> String {
    (0..n).map(|k| if k == i { a } else { 'I' }).collect()
}

/// Open Heisenberg chain with a weak longitudinal field.
pub fn heisenberg(n: usize) -> PauliSum {
    chain(n, |i| {
        let mut v = vec![(0.1 * (i as f64 + 1.0), one_site(n, i, 'Z'))];
        if i + 1 < n {
            for l in ['X', 'Y', 'Z'] {
                v.push((1.0, two_site(n, i, l, l)));
            }
        }
        v
    })
}

/// Open transverse-field Ising chain.
pub fn tfim(n: usize, g: f64) -> PauliSum {
    chain(n, |i| {
        let mut v = vec![(g, one_site(n, i, 'X'))];
        if i + 1 < n {
            v.push((-1.0, two_site(n, i, 'Z', 'Z')));
        }
        v
    })
}

/// Named Hamiltonians with at most six qubits.
pub fn corpus() -> Vec<(String, PauliSum)> {
    let mut out = Vec::new();
    for (nx, ny) in [(1, 2), (1, 3), (2, 2), (1, 4), (1, 5), (2, 3), (3, 2), (1, 6)] {
        out.push((format!("hubbard-{nx}x{ny}"), hubbard(nx, ny)));
    }
    out.push((
        "hubbard-2x2-mu".into(),
        build_hubbard(&HubbardSpec::new(2, 2, 0.7, 2.5, 1.3)).unwrap(),
    ));
    for n in [3, 4, 6] {
        out.push((format!("heisenberg-{n}"), heisenberg(n)));
        out.push((format!("tfim-{n}"), tfim(n, 0.8)));
    }
    for seed in 0..4 {
        out.push((format!("random-{seed}"), random_sum(100 + seed, 3 + seed as usize % 3, 12)));
    }
    out
}
