//! C ABI over `qre-core`.
//!
//! Every function returns a [`QreStatus`]. On failure the message is kept
//! per thread and can be read with [`qre_last_error`]. Hamiltonians are
//! opaque [`QreHamiltonian`] handles released with [`qre_hamiltonian_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qre_core::circuit::{self, GateCount, Strategy};
use qre_core::grouping::{self, Relation};
use qre_core::hamlib::{self, HubbardSpec};
use qre_core::krylov::{self, ScanConfig, Threshold};
use qre_core::pauli::PauliSum;
use qre_core::{qpe, sim, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QreStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Dimension = 4,
    Capability = 5,
    Io = 6,
    Overflow = 7,
    /// The solver finished without a usable result.
    NotSolved = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QreStrategy {
    Naive = 0,
    Grouped = 1,
    Cancel = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QreRelation {
    QubitWise = 0,
    Full = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QreGateCount {
    pub n_1q: u64,
    pub n_2q: u64,
    pub depth: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QreQpePlan {
    pub t: f64,
    pub dt: f64,
    /// Energy-shift coefficient that set `dt`.
    pub e1: f64,
    pub n_t: u64,
    pub n_c: u64,
    pub n_q: u64,
    /// False when `t` came from the norm bound instead of the exact norm.
    pub norm_exact: bool,
}

/// Opaque Hamiltonian handle.
pub struct QreHamiltonian {
    inner: PauliSum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QreStatus {
    match e {
        Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => QreStatus::Parse,
        Error::Dimension { .. } | Error::WordLength { .. } | Error::ModeIndex { .. } => QreStatus::Dimension,
        Error::Capability { .. } => QreStatus::Capability,
        Error::Io { .. } => QreStatus::Io,
        _ => QreStatus::InvalidArgument,
    }
}

fn guard<F>(f: F) -> QreStatus
where
    F: FnOnce() -> Result<(), (QreStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QreStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QreStatus::Panic
        }
    }
}

fn core(e: Error) -> (QreStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QreStatus, String) {
    (QreStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` is null or points to a live value of `T`.
unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QreStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `p` is null or valid for a write of `T`.
unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), (QreStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn c_path<'a>(p: *const c_char) -> Result<&'a str, (QreStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (QreStatus::InvalidArgument, format!("path is not UTF-8: {e}")))
}

fn strategy(s: QreStrategy) -> Strategy {
    match s {
        QreStrategy::Naive => Strategy::Naive,
        QreStrategy::Grouped => Strategy::Grouped,
        QreStrategy::Cancel => Strategy::Cancel,
    }
}

fn relation(r: QreRelation) -> Relation {
    match r {
        QreRelation::QubitWise => Relation::QubitWise,
        QreRelation::Full => Relation::Full,
    }
}

fn handle(h: PauliSum) -> *mut QreHamiltonian {
    Box::into_raw(Box::new(QreHamiltonian { inner: h }))
}

/// Message of the last failed call on this thread, or null after a
/// successful call. The pointer stays valid until the next `qre_` call on
/// the same thread.
#[no_mangle]
pub extern "C" fn qre_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the spinless Fermi-Hubbard Hamiltonian on an open `nx × ny` lattice.
///
/// # Safety
/// `out` must be valid for a pointer write. On success `*out` owns a handle
/// that must be released with [`qre_hamiltonian_free`].
#[no_mangle]
pub unsafe extern "C" fn qre_hubbard(nx: usize, ny: usize, t: f64, u: f64, mu: f64, out: *mut *mut QreHamiltonian) -> QreStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let h = hamlib::build_hubbard(&HubbardSpec::new(nx, ny, t, u, mu)).map_err(core)?;
        write(out, handle(h), "out")
    })
}

/// Loads a Hamiltonian text file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for a pointer
/// write. Release the result with [`qre_hamiltonian_free`].
#[no_mangle]
pub unsafe extern "C" fn qre_hamiltonian_load(path: *const c_char, out: *mut *mut QreHamiltonian) -> QreStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let h = hamlib::load_pauli_file(c_path(path)?).map_err(core)?;
        write(out, handle(h), "out")
    })
}

/// Writes a Hamiltonian text file atomically.
///
/// # Safety
/// `h` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qre_hamiltonian_save(h: *const QreHamiltonian, path: *const c_char) -> QreStatus {
    guard(|| {
        let h = deref(h, "hamiltonian")?;
        hamlib::save_pauli_file(&h.inner, c_path(path)?).map_err(core)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qre_hamiltonian_free(h: *mut QreHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Qubit count and non-identity term count.
///
/// # Safety
/// `h` must be a live handle; `n_qubits` and `n_terms` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qre_hamiltonian_counts(h: *const QreHamiltonian, n_qubits: *mut usize, n_terms: *mut usize) -> QreStatus {
    guard(|| {
        let h = deref(h, "hamiltonian")?;
        write(n_qubits, h.inner.n(), "n_qubits")?;
        write(n_terms, h.inner.len(), "n_terms")
    })
}

/// Dense ground-state energy. Fails with `Capability` above the dense cap.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qre_ground_energy(h: *const QreHamiltonian, out: *mut f64) -> QreStatus {
    guard(|| {
        let h = deref(h, "hamiltonian")?;
        let (e0, _) = sim::ground_state(&h.inner).map_err(core)?;
        write(out, e0, "out")
    })
}

/// Number of sorted-insertion measurement groups.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qre_group_count(h: *const QreHamiltonian, rel: QreRelation, out: *mut usize) -> QreStatus {
    guard(|| {
        let h = deref(h, "hamiltonian")?;
        write(out, grouping::sorted_insertion_group(&h.inner, relation(rel)).len(), "out")
    })
}

/// Worst-case (maximally mixed) shot count at precision `epsilon`.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qre_mm_shots(h: *const QreHamiltonian, rel: QreRelation, epsilon: f64, out: *mut u64) -> QreStatus {
    guard(|| {
        let h = deref(h, "hamiltonian")?;
        let groups = grouping::sorted_insertion_group(&h.inner, relation(rel));
        let est = grouping::maximally_mixed_shot_bound(&h.inner, &groups, epsilon).map_err(core)?;
        write(out, est.total_shots, "out")
    })
}

/// Gate counts of a single Trotter step of length `t`.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qre_trotter_counts(h: *const QreHamiltonian, t: f64, strat: QreStrategy, out: *mut QreGateCount) -> QreStatus {
    guard(|| {
        let h = deref(h, "hamiltonian")?;
        let c = circuit::synth_trotter_step(&h.inner, t, 1, strategy(strat)).map_err(core)?;
        let g = c.count();
        write(
            out,
            QreGateCount {
                n_1q: g.n_1q,
                n_2q: g.n_2q,
                depth: g.depth,
            },
            "out",
        )
    })
}

/// `n_t · (3·n_1q + 6·n_2q)`; `Overflow` when the result exceeds 64 bits.
///
/// # Safety
/// `base` must point to a readable count; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qre_controlled_trotter_cost(n_t: u64, base: *const QreGateCount, out: *mut u64) -> QreStatus {
    guard(|| {
        let b = deref(base, "base")?;
        let g = GateCount {
            n_1q: b.n_1q,
            n_2q: b.n_2q,
            depth: b.depth,
        };
        let cost = circuit::controlled_trotter_cost(n_t, &g);
        let cost = u64::try_from(cost).map_err(|_| (QreStatus::Overflow, format!("cost {cost} exceeds 64 bits")))?;
        write(out, cost, "out")
    })
}

/// Trotter-step plan for phase estimation at precision `epsilon`. Uses the
/// exact symmetric energy shift when the system is small enough, otherwise
/// the closed-form bound.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qre_qpe_plan(h: *const QreHamiltonian, epsilon: f64, strat: QreStrategy, out: *mut QreQpePlan) -> QreStatus {
    guard(|| {
        let h = &deref(h, "hamiltonian")?.inner;
        let base = circuit::synth_trotter_step(h, 1.0, 1, strategy(strat)).map_err(core)?.count();
        let e1 = if h.len() <= qpe::V2_MAX_TERMS && h.n() <= qre_core::linalg::dense_cap() {
            let (_, g) = sim::ground_state(h).map_err(core)?;
            qpe::v2_exact(h, &g, qpe::V2Form::Symmetric).map_err(core)?.abs()
        } else {
            qpe::v2_bound(h)
        };
        let p = qpe::qpe_plan(h, epsilon, e1, &base).map_err(core)?;
        write(
            out,
            QreQpePlan {
                t: p.t,
                dt: p.dt,
                e1: p.e1_used,
                n_t: p.n_t,
                n_c: p.n_c,
                n_q: p.n_q,
                norm_exact: p.norm_exact,
            },
            "out",
        )
    })
}

/// Krylov energy at dimension `d` with exact evolution and the default time
/// step. `delta` is the overlap threshold; pass 0 for none. Returns
/// `NotSolved` when the generalized eigenproblem fails.
///
/// # Safety
/// `h` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qre_krylov_energy(
    h: *const QreHamiltonian,
    overlap_sq: f64,
    d: usize,
    seed: u64,
    delta: f64,
    out: *mut f64,
) -> QreStatus {
    guard(|| {
        let h = &deref(h, "hamiltonian")?.inner;
        let cfg = ScanConfig {
            threshold: Threshold::new(delta).map_err(core)?,
            seed,
            ..ScanConfig::new(overlap_sq, d)
        };
        let scan = krylov::convergence_scan(h, &cfg).map_err(core)?;
        let row = scan
            .rows
            .iter()
            .find(|r| r.d == d)
            .ok_or_else(|| (QreStatus::InvalidArgument, "empty scan".to_string()))?;
        let e = row
            .energy
            .ok_or_else(|| (QreStatus::NotSolved, format!("solve failed: {}", row.status)))?;
        write(out, e, "out")
    })
}
