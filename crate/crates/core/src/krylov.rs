//! Quantum Krylov diagonalization with classically computed matrix elements.
//!
//! The subspace is spanned by `φ_j = U^j b`, `j = 0..d-1`, for `U` either the
//! exact propagator `exp(-iHt)` or an `r`-step Trotter circuit for time `t`.
//! The projected problem `H c = E S c` is solved by whitening over the
//! retained eigenvectors of `S`.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{self, controlled_trotter_cost, Circuit, GateCount, Strategy};
use crate::error::{Error, Result};
use crate::hamlib;
use crate::io;
use crate::linalg::hermitian_eigen;
use crate::pauli::PauliSum;
use crate::report::{Provenance, ResourceReport};
use crate::sim::{self, Propagator, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Evolution {
    Exact,
    Trotter { steps: usize, strategy: Strategy },
}

impl Evolution {
    pub fn trotter(steps: usize) -> Self {
        Evolution::Trotter {
            steps,
            strategy: Strategy::Naive,
        }
    }

    /// Step count, `None` for exact evolution.
    pub fn steps(&self) -> Option<usize> {
        match self {
            Evolution::Exact => None,
            Evolution::Trotter { steps, .. } => Some(*steps),
        }
    }
}

enum Evolver {
    Exact(Propagator),
    Trotter(Circuit),
}

impl Evolver {
    fn new(h: &PauliSum, evolution: Evolution, t: f64, propagator: Option<&Propagator>) -> Result<Self> {
        Ok(match evolution {
            Evolution::Exact => Evolver::Exact(match propagator {
                Some(p) => p.clone(),
                None => Propagator::new(h)?,
            }),
            Evolution::Trotter { steps, strategy } => {
                Evolver::Trotter(circuit::synth_trotter_step(h, t, steps, strategy)?)
            }
        })
    }

    fn step(&self, t: f64, s: &StateVector) -> Result<StateVector> {
        match self {
            Evolver::Exact(p) => p.evolve(t, s),
            Evolver::Trotter(c) => sim::apply_circuit(s, c),
        }
    }
}

fn subspace_with(evolver: &Evolver, b: &StateVector, d: usize, t: f64) -> Result<Vec<StateVector>> {
    if d == 0 {
        return Err(Error::invalid("subspace dimension must be at least 1"));
    }
    b.check_normalized()?;
    let mut basis = Vec::with_capacity(d);
    basis.push(b.clone());
    for j in 1..d {
        let next = evolver.step(t, &basis[j - 1])?;
        basis.push(next);
    }
    Ok(basis)
}

/// `[b, U b, …, U^{d-1} b]`.
pub fn build_subspace(
    h: &PauliSum,
    b: &StateVector,
    d: usize,
    evolution: Evolution,
    t: f64,
) -> Result<Vec<StateVector>> {
    if b.n() != h.n() {
        return Err(Error::Dimension {
            expected: h.n(),
            found: b.n(),
        });
    }
    subspace_with(&Evolver::new(h, evolution, t, None)?, b, d, t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrylovMatrices {
    pub h: DMatrix<Complex64>,
    pub s: DMatrix<Complex64>,
}

impl KrylovMatrices {
    pub fn d(&self) -> usize {
        self.h.nrows()
    }

    /// Leading `d × d` block, the matrices of the first `d` basis vectors.
    pub fn leading(&self, d: usize) -> KrylovMatrices {
        KrylovMatrices {
            h: self.h.view((0, 0), (d, d)).into_owned(),
            s: self.s.view((0, 0), (d, d)).into_owned(),
        }
    }
}

/// `H_ij = <φ_i|H|φ_j>`, `S_ij = <φ_i|φ_j>`.
pub fn assemble_matrices(h: &PauliSum, basis: &[StateVector]) -> Result<KrylovMatrices> {
    if basis.is_empty() {
        return Err(Error::invalid("Krylov basis is empty"));
    }
    for v in basis {
        if v.n() != h.n() {
            return Err(Error::Dimension {
                expected: h.n(),
                found: v.n(),
            });
        }
    }
    let d = basis.len();
    let h_phi = basis
        .par_iter()
        .map(|v| sim::apply_pauli_sum(h, v.amplitudes()))
        .collect::<Result<Vec<_>>>()?;
    let mut hm = DMatrix::zeros(d, d);
    let mut sm = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            hm[(i, j)] = sim::inner(basis[i].amplitudes(), &h_phi[j]);
            sm[(i, j)] = sim::inner(basis[i].amplitudes(), basis[j].amplitudes());
        }
    }
    Ok(KrylovMatrices { h: hm, s: sm })
}

/// Eigenvalue cut on `S`.
///
/// * `delta == 0`: no threshold. Every eigenpair is kept, so the solve fails
///   as soon as `S` has an eigenvalue at or below `1e-14·λ_max` (numerically
///   singular or indefinite).
/// * `delta < 0`: eigenpairs with `λ > delta` are kept; a kept
///   `λ <= 1e-14·λ_max` fails the solve.
/// * `delta > 0`: eigenpairs with `λ > delta` are kept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub delta: f64,
}

impl Threshold {
    pub const NONE: Threshold = Threshold { delta: 0.0 };

    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::invalid("threshold must be finite"));
        }
        Ok(Threshold { delta })
    }

    pub fn is_none(&self) -> bool {
        self.delta == 0.0
    }
}

impl FromStr for Threshold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Threshold::NONE);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("bad threshold {s:?}")))?;
        Threshold::new(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    /// No eigenvalue of `S` survived the threshold.
    NoneRetained,
    /// A retained eigenvalue of `S` is not positive.
    Indefinite,
    NonFinite,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Solved => "solved",
            SolveStatus::NoneRetained => "none_retained",
            SolveStatus::Indefinite => "indefinite",
            SolveStatus::NonFinite => "non_finite",
        })
    }
}

impl FromStr for SolveStatus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solved" => Ok(SolveStatus::Solved),
            "none_retained" => Ok(SolveStatus::NoneRetained),
            "indefinite" => Ok(SolveStatus::Indefinite),
            "non_finite" => Ok(SolveStatus::NonFinite),
            other => Err(Error::invalid(format!("unknown solve status {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GevpSolution {
    pub status: SolveStatus,
    pub energy: Option<f64>,
    pub retained: usize,
}

impl GevpSolution {
    fn failed(status: SolveStatus, retained: usize) -> Self {
        GevpSolution {
            status,
            energy: None,
            retained,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Kept `S` eigenvalues at or below this fraction of the largest fail the solve.
pub const SINGULAR_RATIO: f64 = 1e-14;

/// Lowest generalized eigenvalue of `(H, S)` after thresholding `S`.
pub fn solve_gevp(m: &KrylovMatrices, thr: Threshold) -> GevpSolution {
    let s_eig = hermitian_eigen(hermitize(&m.s));
    let keep: Vec<usize> = (0..s_eig.dim())
        .filter(|&i| thr.is_none() || s_eig.values[i] > thr.delta)
        .collect();
    if keep.is_empty() {
        return GevpSolution::failed(SolveStatus::NoneRetained, 0);
    }
    let floor = SINGULAR_RATIO * s_eig.values.iter().fold(0.0f64, |a, &b| a.max(b));
    if keep.iter().any(|&i| s_eig.values[i] <= floor) {
        return GevpSolution::failed(SolveStatus::Indefinite, keep.len());
    }
    let d = m.d();
    let x = DMatrix::from_fn(d, keep.len(), |r, c| {
        s_eig.vectors[(r, keep[c])] / s_eig.values[keep[c]].sqrt()
    });
    let projected = hermitize(&(x.adjoint() * &m.h * &x));
    if projected.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return GevpSolution::failed(SolveStatus::NonFinite, keep.len());
    }
    let e = hermitian_eigen(projected).values[0];
    if !e.is_finite() {
        return GevpSolution::failed(SolveStatus::NonFinite, keep.len());
    }
    GevpSolution {
        status: SolveStatus::Solved,
        energy: Some(e),
        retained: keep.len(),
    }
}

/// `π / (4‖H‖₂)`, with the dense norm when available. The flag reports
/// whether the exact norm was used.
pub fn default_time_step(h: &PauliSum) -> Result<(f64, bool)> {
    let (norm, exact) = hamlib::spectral_norm_or_bound(h);
    if norm <= 0.0 {
        return Err(Error::invalid("the zero Hamiltonian has no natural time scale"));
    }
    Ok((std::f64::consts::PI / (4.0 * norm), exact))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub overlap_sq: f64,
    pub d_max: usize,
    pub trotter_steps: Vec<usize>,
    pub include_exact: bool,
    /// Krylov time step; `None` selects [`default_time_step`].
    pub t: Option<f64>,
    pub threshold: Threshold,
    pub strategy: Strategy,
    pub seed: u64,
}

impl ScanConfig {
    pub fn new(overlap_sq: f64, d_max: usize) -> Self {
        ScanConfig {
            overlap_sq,
            d_max,
            trotter_steps: Vec::new(),
            include_exact: true,
            t: None,
            threshold: Threshold::NONE,
            strategy: Strategy::Naive,
            seed: 7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub d: usize,
    /// `None` for exact evolution.
    pub n_trotter: Option<usize>,
    pub energy: Option<f64>,
    /// `energy - E0`.
    pub error: Option<f64>,
    pub status: SolveStatus,
}

#[derive(Clone, Debug)]
pub struct KrylovScan {
    pub e0: f64,
    pub t: f64,
    pub rows: Vec<ScanRow>,
    /// Full `d_max` matrices per column, in column order.
    pub matrices: Vec<(Option<usize>, KrylovMatrices)>,
}

impl KrylovScan {
    pub fn column(&self, n_trotter: Option<usize>) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(move |r| r.n_trotter == n_trotter)
    }

    /// Smallest `d` whose error magnitude is at most `tol`.
    pub fn min_d_within(&self, n_trotter: Option<usize>, tol: f64) -> Option<usize> {
        self.column(n_trotter)
            .filter(|r| r.error.is_some_and(|e| e.abs() <= tol))
            .map(|r| r.d)
            .min()
    }

    /// Largest `d` with solved status.
    pub fn max_solved_d(&self, n_trotter: Option<usize>) -> Option<usize> {
        self.column(n_trotter)
            .filter(|r| r.status == SolveStatus::Solved)
            .map(|r| r.d)
            .max()
    }
}

/// Krylov energies for `d = 1..=d_max` under every requested evolution.
/// Columns are independent and run in parallel on the current rayon pool.
pub fn convergence_scan(h: &PauliSum, cfg: &ScanConfig) -> Result<KrylovScan> {
    if cfg.d_max == 0 {
        return Err(Error::invalid("d_max must be at least 1"));
    }
    if cfg.trotter_steps.iter().any(|&r| r == 0) {
        return Err(Error::invalid("Trotter step counts must be at least 1"));
    }
    let propagator = Propagator::new(h)?;
    let e0 = propagator.eigensystem().values[0];
    let ground = StateVector::normalized(propagator.eigensystem().vector(0))?;
    let b = sim::overlap_state(&ground, cfg.overlap_sq, cfg.seed)?;
    let t = match cfg.t {
        Some(t) if t.is_finite() => t,
        Some(_) => return Err(Error::invalid("Krylov time step must be finite")),
        None => default_time_step(h)?.0,
    };
    let mut evolutions: Vec<Evolution> = cfg
        .trotter_steps
        .iter()
        .map(|&steps| Evolution::Trotter {
            steps,
            strategy: cfg.strategy,
        })
        .collect();
    if cfg.include_exact {
        evolutions.push(Evolution::Exact);
    }
    let columns = evolutions
        .par_iter()
        .map(|&ev| -> Result<(Vec<ScanRow>, KrylovMatrices)> {
            let evolver = Evolver::new(h, ev, t, Some(&propagator))?;
            let basis = subspace_with(&evolver, &b, cfg.d_max, t)?;
            let full = assemble_matrices(h, &basis)?;
            let rows = (1..=cfg.d_max)
                .into_par_iter()
                .map(|d| {
                    let sol = solve_gevp(&full.leading(d), cfg.threshold);
                    ScanRow {
                        d,
                        n_trotter: ev.steps(),
                        energy: sol.energy,
                        error: sol.energy.map(|e| e - e0),
                        status: sol.status,
                    }
                })
                .collect();
            Ok((rows, full))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut matrices = Vec::new();
    for (ev, (r, m)) in evolutions.iter().zip(columns) {
        rows.extend(r);
        matrices.push((ev.steps(), m));
    }
    Ok(KrylovScan { e0, t, rows, matrices })
}

pub const SCAN_COLUMNS: [&str; 5] = ["d", "n_trotter", "energy", "error", "status"];

#[derive(Serialize, Deserialize)]
struct CsvRow {
    d: usize,
    n_trotter: String,
    energy: Option<f64>,
    error: Option<f64>,
    status: String,
}

/// `d,n_trotter,energy,error,status`; exact evolution is written as
/// `n_trotter = exact` and failed rows leave energy and error empty.
pub fn scan_to_csv(rows: &[ScanRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(SCAN_COLUMNS)?;
    }
    for r in rows {
        w.serialize(CsvRow {
            d: r.d,
            n_trotter: r.n_trotter.map_or("exact".into(), |s| s.to_string()),
            energy: r.energy,
            error: r.error,
            status: r.status.to_string(),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

pub fn parse_scan_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.deserialize::<CsvRow>() {
        let rec = rec?;
        let n_trotter = match rec.n_trotter.as_str() {
            "exact" => None,
            s => Some(
                s.parse()
                    .map_err(|_| Error::invalid(format!("bad n_trotter {s:?}")))?,
            ),
        };
        out.push(ScanRow {
            d: rec.d,
            n_trotter,
            energy: rec.energy,
            error: rec.error,
            status: rec.status.parse()?,
        });
    }
    Ok(out)
}

pub fn write_scan(rows: &[ScanRow], path: impl AsRef<Path>) -> Result<()> {
    io::write_atomic(path, scan_to_csv(rows)?.as_bytes())
}

pub fn read_scan(path: impl AsRef<Path>) -> Result<Vec<ScanRow>> {
    parse_scan_csv(&io::read_to_string(path)?)
}

/// `KM1 <d>` then the `d` rows of `H` and the `d` rows of `S`, each row as
/// `2d` numbers `re im re im …`.
pub fn to_km1_text(m: &KrylovMatrices) -> String {
    let d = m.d();
    let mut out = format!("KM1 {d}\n");
    for mat in [&m.h, &m.s] {
        for i in 0..d {
            let row: Vec<String> = (0..d)
                .map(|j| format!("{:.16e} {:.16e}", mat[(i, j)].re, mat[(i, j)].im))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

pub fn parse_km1_text(text: &str) -> Result<KrylovMatrices> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing KM1 header".into(),
    })?;
    let d: usize = header
        .trim()
        .strip_prefix("KM1")
        .and_then(|r| r.trim().parse().ok())
        .ok_or(Error::Parse {
            line: 1,
            msg: "expected `KM1 <d>`".into(),
        })?;
    let mut mats = [DMatrix::zeros(d, d), DMatrix::zeros(d, d)];
    for k in 0..2 * d {
        let (idx, line) = lines.next().ok_or(Error::Parse {
            line: k + 2,
            msg: "truncated matrix data".into(),
        })?;
        let vals = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse {
                line: idx + 1,
                msg: "bad number".into(),
            })?;
        if vals.len() != 2 * d {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected {} numbers, found {}", 2 * d, vals.len()),
            });
        }
        for j in 0..d {
            mats[k / d][(k % d, j)] = Complex64::new(vals[2 * j], vals[2 * j + 1]);
        }
    }
    let [h, s] = mats;
    Ok(KrylovMatrices { h, s })
}

pub fn save_matrices(m: &KrylovMatrices, path: impl AsRef<Path>) -> Result<()> {
    io::write_atomic(path, to_km1_text(m).as_bytes())
}

fn check_bound_domain(gap1: f64, gap_n: f64, overlap_sq: f64) -> Result<()> {
    if !(gap1 > 0.0 && gap_n >= gap1 && gap_n.is_finite()) {
        return Err(Error::invalid(format!(
            "gaps must satisfy 0 < gap1 <= gap_n, got ({gap1}, {gap_n})"
        )));
    }
    if !(overlap_sq > 0.0 && overlap_sq <= 1.0) {
        return Err(Error::invalid(format!("overlap must lie in (0, 1], got {overlap_sq}")));
    }
    Ok(())
}

/// `8·ΔE_{N-1}·(1-γ²)/γ²·(1 + π·ΔE_1/ΔE_{N-1})^{-2d}`.
pub fn epperly_bound(gap1: f64, gap_n: f64, overlap_sq: f64, d: f64) -> Result<f64> {
    check_bound_domain(gap1, gap_n, overlap_sq)?;
    let prefactor = 8.0 * gap_n * (1.0 - overlap_sq) / overlap_sq;
    Ok(prefactor * (1.0 + std::f64::consts::PI * gap1 / gap_n).powf(-2.0 * d))
}

/// Real `d` at which [`epperly_bound`] equals `target`, zero when the
/// prefactor is already below it.
pub fn epperly_dimension(gap1: f64, gap_n: f64, overlap_sq: f64, target: f64) -> Result<f64> {
    check_bound_domain(gap1, gap_n, overlap_sq)?;
    if !(target > 0.0) {
        return Err(Error::invalid("target error must be positive"));
    }
    let prefactor = 8.0 * gap_n * (1.0 - overlap_sq) / overlap_sq;
    if prefactor <= target {
        return Ok(0.0);
    }
    let base = (std::f64::consts::PI * gap1 / gap_n).ln_1p();
    Ok((prefactor / target).ln() / (2.0 * base))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearFit {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::invalid("a line fit needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("x values are degenerate"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
    })
}

pub fn linear_extrapolate(points: &[(f64, f64)], x_target: f64) -> Result<f64> {
    Ok(fit_line(points)?.at(x_target))
}

/// `n_Q = n + 1` (one Hadamard-test ancilla), `n_C = d²·N_groups`, two-qubit
/// gates from the controlled Trotter cost.
pub fn krylov_resources(
    n: usize,
    d: u64,
    n_groups: u64,
    trotter_base: &GateCount,
    n_t: u64,
) -> Result<ResourceReport> {
    if d == 0 || n_groups == 0 || n_t == 0 {
        return Err(Error::invalid("Krylov resource inputs must be at least 1"));
    }
    let n_c = d
        .checked_mul(d)
        .and_then(|v| v.checked_mul(n_groups))
        .ok_or_else(|| Error::invalid("circuit count overflows"))?;
    Ok(ResourceReport {
        algorithm: "krylov".into(),
        n_q: n as u64 + 1,
        n_c,
        n_1q: None,
        n_2q: controlled_trotter_cost(n_t, trotter_base),
        provenance_n_c: Provenance::Exact,
        provenance_n_2q: Provenance::EstimatedUpper,
    })
}
