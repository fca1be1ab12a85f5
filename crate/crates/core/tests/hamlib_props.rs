mod common;

use common::*;
use proptest::prelude::*;
use qre_core::hamlib::{self, build_hubbard, HubbardSpec};
use qre_core::pauli::PauliWord;
use qre_core::Error;

#[test]
fn hubbard_one_by_two_example() {
    let h = hubbard(1, 2);
    assert_eq!(h.n(), 2);
    assert_eq!(h.len(), 5);
    let spec = hamlib::dense_spectrum(&h).unwrap();
    let oracle = hermitian_eigenvalues(&sum_matrix(&h));
    for (a, b) in spec.eigenvalues.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((spec.info.e0 + 1.0).abs() < 1e-12);
    assert!((spec.info.norm2 - 4.0).abs() < 1e-12);
    assert_eq!(hamlib::norm_upper_bound(&h), 5.0);
}

#[test]
fn transposed_lattices_share_a_spectrum() {
    for (nx, ny) in [(1, 3), (2, 3), (1, 5), (2, 4)] {
        let a = hermitian_eigenvalues(&sum_matrix(&hubbard(nx, ny)));
        let b = hermitian_eigenvalues(&sum_matrix(&hubbard(ny, nx)));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9, "{nx}x{ny}");
        }
    }
}

#[test]
fn hubbard_term_count_grows_with_edges() {
    for (nx, ny) in [(2, 2), (3, 3), (4, 4), (5, 5)] {
        let spec = HubbardSpec::with_defaults(nx, ny);
        let edges = spec.edges().len();
        assert_eq!(edges, nx * (ny - 1) + ny * (nx - 1));
        let h = build_hubbard(&spec).unwrap();
        // two hopping words per edge, one ZZ per edge, one Z per site
        assert_eq!(h.len(), 3 * edges + nx * ny);
    }
}

#[test]
fn text_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    for (_, h) in corpus() {
        hamlib::save_pauli_file(&h, &path).unwrap();
        let back = hamlib::load_pauli_file(&path).unwrap();
        assert_eq!(back, h);
    }
    let bad = hamlib::parse_pauli_text("qubits 2\n1.0 XX\n0.5 XYZ\n");
    assert!(matches!(bad, Err(Error::WordLength { line: 3, .. })));
    let bad = hamlib::parse_pauli_text("qubits 2\nabc XX\n");
    assert!(matches!(bad, Err(Error::Parse { line: 2, .. })));
}

#[test]
fn dense_cap_is_enforced() {
    let h = hubbard(3, 5);
    assert!(matches!(hamlib::dense_spectrum(&h), Err(Error::Capability { n: 15, .. })));
    let (norm, exact) = hamlib::spectral_norm_or_bound(&h);
    assert!(!exact);
    assert_eq!(norm, hamlib::norm_upper_bound(&h));
}

proptest! {
    #[test]
    fn norm_bound_dominates_dense_norm(seed in 0u64..10_000, n in 1usize..5) {
        let h = random_sum(seed, n, 10).with_identity_offset(seed as f64 % 3.0 - 1.0);
        let dense = op_norm(&sum_matrix(&h));
        prop_assert!(hamlib::norm_upper_bound(&h) >= dense - 1e-12);
        let (norm, exact) = hamlib::spectral_norm_or_bound(&h);
        prop_assert!(exact);
        prop_assert!((norm - dense).abs() < 1e-9);
    }

    #[test]
    fn parse_accepts_what_it_writes(seed in 0u64..10_000, n in 1usize..8) {
        let h = random_sum(seed, n, 12);
        let back = hamlib::parse_pauli_text(&hamlib::to_pauli_text(&h)).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn spectral_info_orders_levels(seed in 0u64..10_000) {
        let h = random_sum(seed, 3, 8);
        let s = hamlib::dense_spectrum(&h).unwrap().info;
        prop_assert!(s.e0 <= s.e1 && s.e1 <= s.emax);
        prop_assert!(s.norm2 >= s.e0.abs().max(s.emax.abs()) - 1e-12);
        let _ = PauliWord::identity(3);
    }
}
