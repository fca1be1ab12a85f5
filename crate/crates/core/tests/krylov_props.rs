mod common;

use common::*;
use proptest::prelude::*;
use qre_core::krylov::{self, Evolution, KrylovMatrices, ScanConfig, SolveStatus, Threshold};
use qre_core::linalg;
use qre_core::sim::{self, StateVector};
use qre_core::Complex64;

fn matrices(h: &qre_core::pauli::PauliSum, b: &StateVector, d: usize, t: f64, ev: Evolution) -> KrylovMatrices {
    let basis = krylov::build_subspace(h, b, d, ev, t).unwrap();
    krylov::assemble_matrices(h, &basis).unwrap()
}

fn small_system() -> impl Strategy<Value = (u64, usize, f64, f64)> {
    (0u64..5_000, 2usize..5, 0.05..1.0f64, 0.05..0.95f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn energies_are_variational((seed, n, t, overlap) in small_system(), d in 1usize..7) {
        let h = random_sum(seed, n, 8);
        let e0 = hermitian_eigenvalues(&sum_matrix(&h))[0];
        let b = sim::prepare_overlap_state(&h, overlap, seed).unwrap();
        let m = matrices(&h, &b, d, t, Evolution::Exact);
        for thr in [Threshold::NONE, Threshold::new(1e-8).unwrap(), Threshold::new(1e-3).unwrap()] {
            let sol = krylov::solve_gevp(&m, thr);
            if let Some(e) = sol.energy {
                prop_assert!(e >= e0 - 1e-8, "{e} < {e0} thr={thr:?} retained={}", sol.retained);
            }
        }
        let m = matrices(&h, &b, d, t, Evolution::trotter(2));
        if let Some(e) = krylov::solve_gevp(&m, Threshold::new(1e-6).unwrap()).energy {
            prop_assert!(e >= e0 - 1e-8);
        }
    }

    #[test]
    fn overlap_matrix_is_a_gram_matrix((seed, n, t, overlap) in small_system(), d in 1usize..8) {
        let h = random_sum(seed, n, 8);
        let b = sim::prepare_overlap_state(&h, overlap, seed).unwrap();
        for ev in [Evolution::Exact, Evolution::trotter(3)] {
            let m = matrices(&h, &b, d, t, ev);
            prop_assert!(op_norm(&(&m.s - m.s.adjoint())) < 1e-12);
            prop_assert!(op_norm(&(&m.h - m.h.adjoint())) < 1e-10);
            for i in 0..d {
                prop_assert!((m.s[(i, i)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
            for l in hermitian_eigenvalues(&m.s) {
                prop_assert!(l >= -1e-10 && l <= d as f64 + 1e-10);
            }
        }
    }

    #[test]
    fn thresholding_never_lowers_the_energy((seed, n, t, overlap) in small_system(), d in 1usize..6, delta in 1e-6..1e-1f64) {
        let h = random_sum(seed, n, 8);
        let b = sim::prepare_overlap_state(&h, overlap, seed).unwrap();
        let m = matrices(&h, &b, d, t, Evolution::Exact);
        let full = krylov::solve_gevp(&m, Threshold::NONE);
        let cut = krylov::solve_gevp(&m, Threshold::new(delta).unwrap());
        if let (Some(f), Some(c)) = (full.energy, cut.energy) {
            prop_assert!(c >= f - 1e-8, "{c} < {f}");
        }
        prop_assert!(cut.retained <= d);
    }

    #[test]
    fn leading_block_matches_a_smaller_subspace((seed, n, t, overlap) in small_system(), d in 2usize..7) {
        let h = random_sum(seed, n, 8);
        let b = sim::prepare_overlap_state(&h, overlap, seed).unwrap();
        let big = matrices(&h, &b, d, t, Evolution::Exact);
        let small = matrices(&h, &b, d - 1, t, Evolution::Exact);
        let lead = big.leading(d - 1);
        prop_assert!(op_norm(&(lead.h - small.h)) < 1e-10);
        prop_assert!(op_norm(&(lead.s - small.s)) < 1e-12);
    }
}

#[test]
fn exact_evolution_energies_decrease_with_dimension() {
    for (name, h) in corpus().into_iter().filter(|(_, h)| h.n() <= 6) {
        let b = sim::prepare_overlap_state(&h, 0.5, 11).unwrap();
        let (t, _) = krylov::default_time_step(&h).unwrap();
        let m = matrices(&h, &b, 5, t, Evolution::Exact);
        let mut prev = f64::INFINITY;
        for d in 1..=5 {
            let sol = krylov::solve_gevp(&m.leading(d), Threshold::NONE);
            let Some(e) = sol.energy else { break };
            assert!(e <= prev + 1e-10, "{name} d={d}: {e} > {prev}");
            prev = e;
        }
    }
}

#[test]
fn eigenbasis_gives_diagonal_matrices() {
    let h = hubbard(2, 2);
    let eig = linalg::eigensystem(&h).unwrap();
    let basis: Vec<StateVector> = (0..5)
        .map(|i| StateVector::from_amplitudes(eig.vector(i)).unwrap())
        .collect();
    let m = krylov::assemble_matrices(&h, &basis).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let (hs, ss) = if i == j {
                (Complex64::new(eig.values[i], 0.0), Complex64::new(1.0, 0.0))
            } else {
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
            };
            assert!((m.h[(i, j)] - hs).norm() < 1e-10);
            assert!((m.s[(i, j)] - ss).norm() < 1e-10);
        }
    }
    assert!((krylov::solve_gevp(&m, Threshold::NONE).energy.unwrap() - eig.values[0]).abs() < 1e-10);
}

#[test]
fn degenerate_subspace_fails_without_threshold() {
    let h = hubbard(1, 2);
    let (_, g) = sim::ground_state(&h).unwrap();
    let m = matrices(&h, &g, 4, 0.3, Evolution::Exact);
    let none = krylov::solve_gevp(&m, Threshold::NONE);
    assert_ne!(none.status, SolveStatus::Solved);
    let cut = krylov::solve_gevp(&m, Threshold::new(1e-6).unwrap());
    assert_eq!(cut.retained, 1);
    assert!((cut.energy.unwrap() + 1.0).abs() < 1e-10);
}

#[test]
fn scan_rows_and_csv_round_trip() {
    let h = hubbard(1, 3);
    let mut cfg = ScanConfig::new(0.5, 6);
    cfg.trotter_steps = vec![5, 10];
    let scan = krylov::convergence_scan(&h, &cfg).unwrap();
    assert_eq!(scan.rows.len(), 6 * 3);
    assert_eq!(scan.matrices.len(), 3);
    for r in &scan.rows {
        if let Some(err) = r.error {
            assert!(err >= -1e-8 || r.n_trotter.is_some());
        }
    }
    let csv = krylov::scan_to_csv(&scan.rows).unwrap();
    let back = krylov::parse_scan_csv(&csv).unwrap();
    assert_eq!(back.len(), scan.rows.len());
    for (a, b) in back.iter().zip(&scan.rows) {
        assert_eq!((a.d, a.n_trotter, a.status), (b.d, b.n_trotter, b.status));
        match (a.energy, b.energy) {
            (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0)),
            (None, None) => {}
            other => panic!("{other:?}"),
        }
    }
    // the same seed reproduces the scan
    let again = krylov::convergence_scan(&h, &cfg).unwrap();
    assert_eq!(again.rows, scan.rows);
}

#[test]
fn matrix_text_round_trip() {
    let h = heisenberg(3);
    let b = sim::prepare_overlap_state(&h, 0.4, 2).unwrap();
    let m = matrices(&h, &b, 4, 0.2, Evolution::Exact);
    let back = krylov::parse_km1_text(&krylov::to_km1_text(&m)).unwrap();
    assert!(op_norm(&(back.h - &m.h)) < 1e-12);
    assert!(op_norm(&(back.s - &m.s)) < 1e-12);
}

proptest! {
    #[test]
    fn bound_inverts_and_decays(gap1 in 0.01..2.0f64, extra in 0.0..20.0f64, overlap in 0.01..0.99f64, target in 1e-8..1e-2f64) {
        let gap_n = gap1 + extra;
        let d = krylov::epperly_dimension(gap1, gap_n, overlap, target).unwrap();
        if d > 0.0 {
            let at = krylov::epperly_bound(gap1, gap_n, overlap, d).unwrap();
            prop_assert!((at - target).abs() <= 1e-9 * target);
        }
        let a = krylov::epperly_bound(gap1, gap_n, overlap, d + 1.0).unwrap();
        let b = krylov::epperly_bound(gap1, gap_n, overlap, d).unwrap();
        prop_assert!(a < b);
    }

    #[test]
    fn line_fit_recovers_exact_lines(slope in -10.0..10.0f64, icpt in -10.0..10.0f64, xs in proptest::collection::vec(-5.0..5.0f64, 2..8)) {
        prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-3));
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, slope * x + icpt)).collect();
        let fit = krylov::fit_line(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-8);
        prop_assert!((krylov::linear_extrapolate(&pts, 0.0).unwrap() - icpt).abs() < 1e-8);
    }
}

#[test]
fn bound_domain_errors() {
    assert!(krylov::epperly_bound(0.0, 1.0, 0.5, 3.0).is_err());
    assert!(krylov::epperly_bound(1.0, 1.0, 0.0, 3.0).is_err());
    assert!(krylov::epperly_dimension(1.0, 1.0, 0.5, 0.0).is_err());
    assert!(krylov::fit_line(&[(1.0, 2.0)]).is_err());
    assert!(krylov::fit_line(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
}
