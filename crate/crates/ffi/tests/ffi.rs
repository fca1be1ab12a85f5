use std::ffi::{CStr, CString};
use std::ptr;

use qre::*;

fn hubbard(nx: usize, ny: usize) -> *mut QreHamiltonian {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { qre_hubbard(nx, ny, 1.0, 4.0, 0.0, &mut h) }, QreStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = qre_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn hubbard_counts_and_ground_energy() {
    let h = hubbard(1, 2);
    let (mut n, mut terms) = (0usize, 0usize);
    unsafe {
        assert_eq!(qre_hamiltonian_counts(h, &mut n, &mut terms), QreStatus::Ok);
        assert_eq!((n, terms), (2, 5));
        let mut e0 = 0.0;
        assert_eq!(qre_ground_energy(h, &mut e0), QreStatus::Ok);
        assert!((e0 + 1.0).abs() < 1e-12);
        qre_hamiltonian_free(h);
    }
    assert!(qre_last_error().is_null());
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = CString::new(dir.path().join("h.txt").to_str().unwrap()).unwrap();
    let h = hubbard(2, 2);
    unsafe {
        assert_eq!(qre_hamiltonian_save(h, file.as_ptr()), QreStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qre_hamiltonian_load(file.as_ptr(), &mut back), QreStatus::Ok);
        let (mut a, mut b) = ((0, 0), (0, 0));
        qre_hamiltonian_counts(h, &mut a.0, &mut a.1);
        qre_hamiltonian_counts(back, &mut b.0, &mut b.1);
        assert_eq!(a, b);
        qre_hamiltonian_free(back);
        qre_hamiltonian_free(h);
    }
}

#[test]
fn errors_set_status_and_message() {
    let missing = CString::new("/nonexistent/dir/h.txt").unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(qre_hamiltonian_load(missing.as_ptr(), &mut h), QreStatus::Io);
        assert!(h.is_null());
        assert!(last_error().contains("nonexistent"));
        assert_eq!(qre_hamiltonian_load(ptr::null(), &mut h), QreStatus::NullPointer);
        let mut e0 = 0.0;
        assert_eq!(qre_ground_energy(ptr::null(), &mut e0), QreStatus::NullPointer);
        assert_eq!(qre_hubbard(0, 2, 1.0, 4.0, 0.0, &mut h), QreStatus::InvalidArgument);
        qre_hamiltonian_free(ptr::null_mut());
    }
}

#[test]
fn grouping_and_shots() {
    let h = hubbard(1, 2);
    let (mut qwc, mut full, mut shots) = (0usize, 0usize, 0u64);
    unsafe {
        assert_eq!(qre_group_count(h, QreRelation::QubitWise, &mut qwc), QreStatus::Ok);
        assert_eq!(qre_group_count(h, QreRelation::Full, &mut full), QreStatus::Ok);
        assert!(full <= qwc && qwc <= 5);
        assert_eq!(qre_mm_shots(h, QreRelation::QubitWise, 1e-3, &mut shots), QreStatus::Ok);
        assert!(shots > 0);
        assert_eq!(qre_mm_shots(h, QreRelation::QubitWise, -1.0, &mut shots), QreStatus::InvalidArgument);
        qre_hamiltonian_free(h);
    }
}

#[test]
fn trotter_counts_and_controlled_cost() {
    let h = hubbard(2, 2);
    let mut naive = QreGateCount::default();
    let mut cancel = QreGateCount::default();
    unsafe {
        assert_eq!(qre_trotter_counts(h, 0.1, QreStrategy::Naive, &mut naive), QreStatus::Ok);
        assert_eq!(qre_trotter_counts(h, 0.1, QreStrategy::Cancel, &mut cancel), QreStatus::Ok);
        qre_hamiltonian_free(h);
    }
    assert!(cancel.n_2q <= naive.n_2q);
    let base = QreGateCount { n_1q: 2, n_2q: 1, depth: 0 };
    let mut cost = 0;
    unsafe {
        assert_eq!(qre_controlled_trotter_cost(10, &base, &mut cost), QreStatus::Ok);
        assert_eq!(cost, 120);
        let big = QreGateCount { n_1q: u64::MAX, n_2q: 0, depth: 0 };
        assert_eq!(qre_controlled_trotter_cost(u64::MAX, &big, &mut cost), QreStatus::Overflow);
    }
    assert!(last_error().contains("64 bits"));
}

#[test]
fn qpe_plan_and_krylov_energy() {
    let h = hubbard(1, 2);
    let mut plan = QreQpePlan::default();
    let mut e = 0.0;
    unsafe {
        assert_eq!(qre_qpe_plan(h, 1e-3, QreStrategy::Cancel, &mut plan), QreStatus::Ok);
        assert_eq!(plan.n_c, 10);
        assert_eq!(plan.n_q, 3);
        assert!(plan.n_t >= 1 && plan.norm_exact);
        assert_eq!(qre_krylov_energy(h, 0.85, 4, 7, 0.0, &mut e), QreStatus::Ok);
        assert!(e >= -1.0 - 1e-8 && e < -1.0 + 1e-3);
        qre_hamiltonian_free(h);
    }
}

#[test]
fn header_is_generated_and_parses() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qre.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["qre_hubbard", "qre_last_error", "QRE_STATUS_OVERFLOW", "typedef struct QreHamiltonian QreHamiltonian"] {
        assert!(text.contains(sym), "{sym}");
    }
    if let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
