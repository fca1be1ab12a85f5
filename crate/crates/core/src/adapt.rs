//! ADAPT-VQE with a qubit-excitation pool.
//!
//! Each pool operator is a Hermitian generator `G` whose Pauli terms commute,
//! so `e^{iθG}` is the exact product of the per-term exponentials. The
//! ansatz is `e^{iθ_N G_N} ⋯ e^{iθ_1 G_1} |ref⟩`.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{synth_pauli_exponential, Circuit, GateCount};
use crate::error::{Error, Result};
use crate::io;
use crate::optimize::{bfgs, BfgsOptions};
use crate::pauli::{Letter, PauliSum, PauliTerm, PauliWord};
use crate::sim::{self, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub struct PoolOperator {
    pub label: String,
    /// Hermitian `G`; the anti-Hermitian generator is `A = iG`.
    pub generator: PauliSum,
    pub support: Vec<usize>,
}

fn word(n: usize, letters: &[(usize, Letter)]) -> PauliWord {
    PauliWord::from_sparse(n, letters).expect("pool qubits are in range")
}

fn single(n: usize, i: usize, j: usize) -> PoolOperator {
    use Letter::{X, Y};
    let generator = PauliSum::from_terms(
        n,
        [
            (0.5, word(n, &[(i, X), (j, Y)])),
            (-0.5, word(n, &[(i, Y), (j, X)])),
        ],
    )
    .expect("pool words match the qubit count");
    PoolOperator {
        label: format!("s({i},{j})"),
        generator,
        support: vec![i, j],
    }
}

fn double(n: usize, i: usize, j: usize, k: usize, l: usize) -> PoolOperator {
    use Letter::{X, Y};
    let table: [(f64, [Letter; 4]); 8] = [
        (1.0, [X, Y, X, X]),
        (1.0, [Y, X, X, X]),
        (1.0, [Y, Y, Y, X]),
        (1.0, [Y, Y, X, Y]),
        (-1.0, [X, X, Y, X]),
        (-1.0, [X, X, X, Y]),
        (-1.0, [Y, X, Y, Y]),
        (-1.0, [X, Y, Y, Y]),
    ];
    let generator = PauliSum::from_terms(
        n,
        table.iter().map(|(c, ls)| {
            (
                c / 8.0,
                word(n, &[(i, ls[0]), (j, ls[1]), (k, ls[2]), (l, ls[3])]),
            )
        }),
    )
    .expect("pool words match the qubit count");
    let mut support = vec![i, j, k, l];
    support.sort_unstable();
    PoolOperator {
        label: format!("d({i},{j},{k},{l})"),
        generator,
        support,
    }
}

/// Singles `(X_iY_j - Y_iX_j)/2` for `i < j`, then doubles moving the pair
/// `(i, j)` to `(k, l)` for `i < j`, `k < l`, all four distinct and `i` the
/// smallest index (each 4-subset yields its three pairings once).
pub fn build_qe_pool(n: usize) -> Result<Vec<PoolOperator>> {
    if n < 2 {
        return Err(Error::invalid("the qubit-excitation pool needs at least 2 qubits"));
    }
    let mut pool = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pool.push(single(n, i, j));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in i + 1..n {
                for l in k + 1..n {
                    if k != j && l != j {
                        pool.push(double(n, i, j, k, l));
                    }
                }
            }
        }
    }
    Ok(pool)
}

/// `ψ ← e^{iθG} ψ`, or its inverse when `theta` is negated by the caller.
fn apply_generator_exp(amps: &mut Vec<Complex64>, g: &PauliSum, theta: f64) {
    for t in g.terms() {
        let a = theta * t.coefficient;
        let mut rotated = vec![Complex64::new(0.0, 0.0); amps.len()];
        sim::accumulate_word(&mut rotated, &t.word, Complex64::new(0.0, a.sin()), amps);
        for (x, r) in amps.iter_mut().zip(rotated) {
            *x = *x * a.cos() + r;
        }
    }
}

fn apply_generator(g: &PauliSum, amps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for t in g.terms() {
        sim::accumulate_word(&mut out, &t.word, Complex64::new(t.coefficient, 0.0), amps);
    }
    out
}

/// `⟨ψ|[H, iG]|ψ⟩ = -2 Im⟨Hψ|Gψ⟩`, the derivative of the energy when
/// `e^{iθG}` is appended at `θ = 0`.
pub fn operator_gradient(h: &PauliSum, state: &StateVector, op: &PoolOperator) -> Result<f64> {
    if state.n() != h.n() || op.generator.n() != h.n() {
        return Err(Error::Dimension {
            expected: h.n(),
            found: if state.n() != h.n() { state.n() } else { op.generator.n() },
        });
    }
    let hpsi = sim::apply_pauli_sum(h, state.amplitudes())?;
    Ok(gradient_with(&hpsi, state.amplitudes(), op))
}

fn gradient_with(hpsi: &[Complex64], psi: &[Complex64], op: &PoolOperator) -> f64 {
    let gpsi = apply_generator(&op.generator, psi);
    -2.0 * sim::inner(hpsi, &gpsi).im
}

/// `e^{iθ_N G_N} ⋯ e^{iθ_1 G_1} |ref⟩`.
pub fn ansatz_state(reference: &StateVector, ops: &[&PoolOperator], thetas: &[f64]) -> Result<StateVector> {
    if ops.len() != thetas.len() {
        return Err(Error::invalid("one parameter per ansatz operator is required"));
    }
    let mut amps = reference.amplitudes().to_vec();
    for (op, &th) in ops.iter().zip(thetas) {
        if op.generator.n() != reference.n() {
            return Err(Error::Dimension {
                expected: reference.n(),
                found: op.generator.n(),
            });
        }
        apply_generator_exp(&mut amps, &op.generator, th);
    }
    StateVector::normalized(amps)
}

/// Energy and parameter gradient by one forward and one backward sweep.
fn energy_and_gradient(
    h: &PauliSum,
    reference: &StateVector,
    ops: &[&PoolOperator],
    thetas: &[f64],
) -> (f64, Vec<f64>) {
    let mut psi = reference.amplitudes().to_vec();
    for (op, &th) in ops.iter().zip(thetas) {
        apply_generator_exp(&mut psi, &op.generator, th);
    }
    let mut lambda = sim::apply_pauli_sum(h, &psi).expect("dimensions checked by caller");
    let energy = sim::inner(&psi, &lambda).re;
    let mut grad = vec![0.0; ops.len()];
    for k in (0..ops.len()).rev() {
        let gpsi = apply_generator(&ops[k].generator, &psi);
        grad[k] = -2.0 * sim::inner(&lambda, &gpsi).im;
        apply_generator_exp(&mut psi, &ops[k].generator, -thetas[k]);
        apply_generator_exp(&mut lambda, &ops[k].generator, -thetas[k]);
    }
    (energy, grad)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopCriteria {
    /// Stop when the pool gradient's Euclidean norm falls below this.
    pub grad_tol: f64,
    /// `(ε, E0)`: stop once `|E - E0| < ε`.
    pub target: Option<(f64, f64)>,
    pub max_iters: usize,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria {
            grad_tol: 1e-6,
            target: None,
            max_iters: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptStatus {
    GradientConverged,
    TargetReached,
    MaxIterations,
    /// The parameter optimizer ran out of evaluations; the state is the best
    /// point it found.
    OptimizerNotConverged,
}

impl fmt::Display for AdaptStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdaptStatus::GradientConverged => "gradient_converged",
            AdaptStatus::TargetReached => "target_reached",
            AdaptStatus::MaxIterations => "max_iterations",
            AdaptStatus::OptimizerNotConverged => "optimizer_not_converged",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub selected_label: String,
    pub gradient: f64,
    pub energy: f64,
    pub n_2q_cumulative: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzElement {
    pub op: PoolOperator,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptState {
    pub n: usize,
    pub ansatz: Vec<AnsatzElement>,
    pub energy: f64,
    /// Pool gradient norm at the last screening.
    pub gradient_norm: f64,
    pub iterations: usize,
    pub status: AdaptStatus,
    pub trace: Vec<TraceRow>,
}

impl AdaptState {
    pub fn state(&self, reference: &StateVector) -> Result<StateVector> {
        let ops: Vec<&PoolOperator> = self.ansatz.iter().map(|a| &a.op).collect();
        let thetas: Vec<f64> = self.ansatz.iter().map(|a| a.theta).collect();
        ansatz_state(reference, &ops, &thetas)
    }
}

fn elements_circuit(n: usize, elements: &[AnsatzElement]) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    for el in elements {
        for t in el.op.generator.terms() {
            // exp(iθ c P) = exp(-i c (-θ) P)
            let term = PauliTerm::new(t.coefficient, t.word.clone());
            c.extend(&synth_pauli_exponential(&term, -el.theta)?)?;
        }
    }
    Ok(c)
}

/// Circuit of the ansatz (the reference preparation is not included).
pub fn ansatz_circuit(state: &AdaptState) -> Result<Circuit> {
    elements_circuit(state.n, &state.ansatz)
}

pub fn ansatz_gate_count(state: &AdaptState) -> Result<GateCount> {
    Ok(ansatz_circuit(state)?.count())
}

/// Grows the ansatz one operator at a time, choosing the largest
/// `|gradient|` (lowest pool index on ties) and reoptimizing every parameter
/// from the previous optimum with the new angle at zero.
pub fn adapt_run(
    h: &PauliSum,
    reference: &StateVector,
    pool: &[PoolOperator],
    stop: StopCriteria,
    optimizer: BfgsOptions,
) -> Result<AdaptState> {
    if reference.n() != h.n() {
        return Err(Error::Dimension {
            expected: h.n(),
            found: reference.n(),
        });
    }
    reference.check_normalized()?;
    if let Some(op) = pool.iter().find(|op| op.generator.n() != h.n()) {
        return Err(Error::Dimension {
            expected: h.n(),
            found: op.generator.n(),
        });
    }
    let mut selected: Vec<usize> = Vec::new();
    let mut thetas: Vec<f64> = Vec::new();
    let mut psi = reference.clone();
    let mut energy = sim::expectation(reference, h)?;
    let mut trace = Vec::new();
    let mut n_2q = 0u64;
    let finish = |selected: &[usize], thetas: &[f64], energy, gnorm, status, trace| AdaptState {
        n: h.n(),
        ansatz: selected
            .iter()
            .zip(thetas)
            .map(|(&i, &theta)| AnsatzElement {
                op: pool[i].clone(),
                theta,
            })
            .collect(),
        energy,
        gradient_norm: gnorm,
        iterations: selected.len(),
        status,
        trace,
    };
    loop {
        let hpsi = sim::apply_pauli_sum(h, psi.amplitudes())?;
        let grads: Vec<f64> = pool
            .par_iter()
            .map(|op| gradient_with(&hpsi, psi.amplitudes(), op))
            .collect();
        let gnorm = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
        if let Some((eps, e0)) = stop.target {
            if (energy - e0).abs() < eps {
                return Ok(finish(&selected, &thetas, energy, gnorm, AdaptStatus::TargetReached, trace));
            }
        }
        if gnorm < stop.grad_tol || pool.is_empty() {
            return Ok(finish(&selected, &thetas, energy, gnorm, AdaptStatus::GradientConverged, trace));
        }
        if selected.len() >= stop.max_iters {
            return Ok(finish(&selected, &thetas, energy, gnorm, AdaptStatus::MaxIterations, trace));
        }
        let mut best = 0;
        for (i, g) in grads.iter().enumerate() {
            if g.abs() > grads[best].abs() {
                best = i;
            }
        }
        selected.push(best);
        thetas.push(0.0);
        let ops: Vec<&PoolOperator> = selected.iter().map(|&i| &pool[i]).collect();
        let result = bfgs(&thetas, |x| energy_and_gradient(h, reference, &ops, x), optimizer);
        thetas = result.x;
        energy = result.value;
        psi = ansatz_state(reference, &ops, &thetas)?;
        let added = AnsatzElement {
            op: pool[best].clone(),
            theta: thetas[thetas.len() - 1],
        };
        n_2q += elements_circuit(h.n(), std::slice::from_ref(&added))?.count().n_2q;
        trace.push(TraceRow {
            iter: selected.len(),
            selected_label: pool[best].label.clone(),
            gradient: grads[best],
            energy,
            n_2q_cumulative: n_2q,
        });
        if !result.converged {
            return Ok(finish(
                &selected,
                &thetas,
                energy,
                gnorm,
                AdaptStatus::OptimizerNotConverged,
                trace,
            ));
        }
    }
}

/// Computational basis state with qubits `0..particles` occupied.
pub fn occupied_reference(n: usize, particles: usize) -> Result<StateVector> {
    if particles > n {
        return Err(Error::invalid(format!(
            "cannot place {particles} particles on {n} qubits"
        )));
    }
    StateVector::basis(n, (1usize << particles) - 1)
}

/// Particle number `Σ (1 - ⟨Z_q⟩)/2` of a state, rounded.
pub fn particle_number(state: &StateVector) -> Result<usize> {
    let mut total = 0.0;
    for q in 0..state.n() {
        let z = sim::pauli_expectation(state, &PauliWord::single(state.n(), q, Letter::Z)?)?;
        total += (1.0 - z) / 2.0;
    }
    Ok(total.round() as usize)
}

pub fn trace_to_csv(rows: &[TraceRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["iter", "selected_label", "gradient", "energy", "n_2q_cumulative"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_trace(rows: &[TraceRow], path: impl AsRef<Path>) -> Result<()> {
    io::write_atomic(path, trace_to_csv(rows)?.as_bytes())
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    parse_trace_csv(&io::read_to_string(path)?)
}
