//! `{U, CNOT}` circuits, Pauli-exponential and Trotter synthesis, gate
//! accounting.
//!
//! A circuit carries a global phase `φ`; its unitary is `e^{iφ}` times the
//! product of its gates, the first gate acting first.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::{sorted_insertion_group, Relation};
use crate::io;
use crate::pauli::{Letter, PauliSum, PauliTerm};

pub type Matrix2 = [[Complex64; 2]; 2];

const UNITARY_TOLERANCE: f64 = 1e-12;
const MERGE_TOLERANCE: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn hadamard() -> Matrix2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
}

pub fn s_gate() -> Matrix2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]
}

pub fn s_dagger() -> Matrix2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]
}

/// `exp(-iθZ) = diag(e^{-iθ}, e^{iθ})`.
pub fn rz(theta: f64) -> Matrix2 {
    [
        [Complex64::from_polar(1.0, -theta), c(0.0, 0.0)],
        [c(0.0, 0.0), Complex64::from_polar(1.0, theta)],
    ]
}

/// Matrix product `a · b` (apply `b` first).
pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn is_unitary(m: &Matrix2, tol: f64) -> bool {
    let adj = [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ];
    let p = matmul2(&adj, m);
    (p[0][0] - 1.0).norm() <= tol
        && (p[1][1] - 1.0).norm() <= tol
        && p[0][1].norm() <= tol
        && p[1][0].norm() <= tol
}

/// `Some(φ)` when `m ≈ e^{iφ} I`.
fn scalar_phase(m: &Matrix2) -> Option<f64> {
    (m[0][1].norm() < MERGE_TOLERANCE
        && m[1][0].norm() < MERGE_TOLERANCE
        && (m[0][0] - m[1][1]).norm() < MERGE_TOLERANCE)
        .then(|| m[0][0].arg())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    U { qubit: usize, matrix: Matrix2 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phi: f64) {
        self.global_phase += phi;
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::invalid(format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        Ok(())
    }

    pub fn push_u(&mut self, qubit: usize, matrix: Matrix2) -> Result<()> {
        self.check_qubit(qubit)?;
        if !is_unitary(&matrix, UNITARY_TOLERANCE) {
            return Err(Error::invalid(format!("gate on qubit {qubit} is not unitary")));
        }
        self.gates.push(Gate::U { qubit, matrix });
        Ok(())
    }

    pub fn push_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::invalid("CNOT control equals target"));
        }
        self.gates.push(Gate::Cnot { control, target });
        Ok(())
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::U { qubit, matrix } => self.push_u(qubit, matrix),
            Gate::Cnot { control, target } => self.push_cnot(control, target),
        }
    }

    /// Appends `other`, which acts after the gates already present.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.global_phase += other.global_phase;
        Ok(())
    }

    pub fn count(&self) -> GateCount {
        count_gates(self)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCount {
    pub n_1q: u64,
    pub n_2q: u64,
    pub depth: u64,
}

impl std::ops::Add for GateCount {
    type Output = GateCount;
    /// Counts add; depth adds as for sequential composition.
    fn add(self, rhs: GateCount) -> GateCount {
        GateCount {
            n_1q: self.n_1q + rhs.n_1q,
            n_2q: self.n_2q + rhs.n_2q,
            depth: self.depth + rhs.depth,
        }
    }
}

/// Exact gate tally; depth by greedy layering on qubit availability.
pub fn count_gates(c: &Circuit) -> GateCount {
    let mut level = vec![0u64; c.n];
    let mut count = GateCount::default();
    for g in &c.gates {
        match *g {
            Gate::U { qubit, .. } => {
                count.n_1q += 1;
                level[qubit] += 1;
            }
            Gate::Cnot { control, target } => {
                count.n_2q += 1;
                let l = level[control].max(level[target]) + 1;
                level[control] = l;
                level[target] = l;
            }
        }
    }
    count.depth = level.into_iter().max().unwrap_or(0);
    count
}

/// Two-qubit gate estimate for `n_t` controlled Trotter steps: a controlled
/// single-qubit gate costs at most 3 CNOTs and a Toffoli at most 6.
/// Saturates at `u128::MAX`.
pub fn controlled_trotter_cost(n_t: u64, base: &GateCount) -> u128 {
    let per_step = (3 * base.n_1q as u128).saturating_add(6 * base.n_2q as u128);
    (n_t as u128).saturating_mul(per_step)
}

/// Circuit for `exp(-i·coefficient·angle_scale·P)`.
///
/// X and Y letters are rotated to Z, a CNOT chain collects the parity onto the
/// last chain qubit, `Rz` applies the phase, and the chain and basis changes
/// are undone. The chain visits Z-letter qubits first, then X/Y qubits, each
/// in ascending order.
pub fn synth_pauli_exponential(term: &PauliTerm, angle_scale: f64) -> Result<Circuit> {
    let word = &term.word;
    if word.is_identity() {
        return Err(Error::IdentityTerm);
    }
    let theta = term.coefficient * angle_scale;
    let mut circ = Circuit::new(word.n());
    let support = word.support();
    let (z_part, xy_part): (Vec<usize>, Vec<usize>) =
        support.iter().partition(|&&q| word.letter(q) == Letter::Z);
    let chain: Vec<usize> = z_part.iter().chain(&xy_part).copied().collect();

    // H·S† maps Y to Z, S·H maps back
    let into_z = |l: Letter| match l {
        Letter::X => hadamard(),
        _ => matmul2(&hadamard(), &s_dagger()),
    };
    let out_of_z = |l: Letter| match l {
        Letter::X => hadamard(),
        _ => matmul2(&s_gate(), &hadamard()),
    };
    for &q in &xy_part {
        circ.gates.push(Gate::U {
            qubit: q,
            matrix: into_z(word.letter(q)),
        });
    }
    for pair in chain.windows(2) {
        circ.gates.push(Gate::Cnot {
            control: pair[0],
            target: pair[1],
        });
    }
    let last = *chain.last().expect("non-identity word has support");
    circ.gates.push(Gate::U {
        qubit: last,
        matrix: rz(theta),
    });
    for pair in chain.windows(2).rev() {
        circ.gates.push(Gate::Cnot {
            control: pair[0],
            target: pair[1],
        });
    }
    for &q in &xy_part {
        circ.gates.push(Gate::U {
            qubit: q,
            matrix: out_of_z(word.letter(q)),
        });
    }
    Ok(circ)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Hamiltonian input order.
    Naive,
    /// Full-commutation groups in greedy order; inside a group by
    /// descending |c|, then by support, then by word.
    Grouped,
    /// Grouped order followed by a peephole pass.
    Cancel,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Naive, Strategy::Grouped, Strategy::Cancel];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Naive => "naive",
            Strategy::Grouped => "grouped",
            Strategy::Cancel => "cancel",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "grouped" => Ok(Strategy::Grouped),
            "cancel" => Ok(Strategy::Cancel),
            other => Err(Error::invalid(format!(
                "unknown strategy {other:?} (expected naive, grouped or cancel)"
            ))),
        }
    }
}

/// Indices of the non-identity terms of `h` in the order a strategy applies them.
pub fn term_order(h: &PauliSum, strategy: Strategy) -> Vec<usize> {
    match strategy {
        Strategy::Naive => (0..h.len()).collect(),
        Strategy::Grouped | Strategy::Cancel => {
            let terms = h.terms();
            let groups = sorted_insertion_group(h, Relation::Full);
            let mut order = Vec::with_capacity(h.len());
            for g in groups.groups() {
                let mut members = g.clone();
                members.sort_by(|&a, &b| {
                    let (ta, tb) = (&terms[a], &terms[b]);
                    tb.coefficient
                        .abs()
                        .total_cmp(&ta.coefficient.abs())
                        .then_with(|| ta.word.support().cmp(&tb.word.support()))
                        .then_with(|| ta.word.cmp(&tb.word))
                });
                order.extend(members);
            }
            order
        }
    }
}

/// `[Π_j exp(-i h_j t/r)]^r` in the strategy's term order, the first term in
/// that order acting first. The identity offset contributes the global phase
/// `-offset·t`.
pub fn synth_trotter_step(h: &PauliSum, t: f64, r: usize, strategy: Strategy) -> Result<Circuit> {
    if r == 0 {
        return Err(Error::invalid("Trotter step count must be at least 1"));
    }
    if !t.is_finite() {
        return Err(Error::invalid("evolution time must be finite"));
    }
    let dt = t / r as f64;
    let mut step = Circuit::new(h.n());
    for i in term_order(h, strategy) {
        step.extend(&synth_pauli_exponential(&h.terms()[i], dt)?)?;
    }
    let mut circ = Circuit::new(h.n());
    for _ in 0..r {
        circ.gates.extend_from_slice(&step.gates);
    }
    circ.global_phase = -h.identity_offset() * t;
    if strategy == Strategy::Cancel {
        circ = peephole(&circ);
    }
    Ok(circ)
}

/// Removes adjacent identical CNOT pairs and merges adjacent single-qubit
/// gates, repeating through any cancellations this exposes. A merged gate
/// equal to a scalar is dropped and its phase moved into the global phase.
pub fn peephole(c: &Circuit) -> Circuit {
    let mut slots: Vec<Option<Gate>> = Vec::with_capacity(c.gates.len());
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); c.n];
    let mut phase = c.global_phase;
    for g in &c.gates {
        match g {
            Gate::U { qubit, matrix } => {
                let q = *qubit;
                if let Some(&top) = stacks[q].last() {
                    if let Some(Gate::U { matrix: prev, .. }) = &slots[top] {
                        let merged = matmul2(matrix, prev);
                        match scalar_phase(&merged) {
                            Some(phi) => {
                                slots[top] = None;
                                stacks[q].pop();
                                phase += phi;
                            }
                            None => {
                                slots[top] = Some(Gate::U {
                                    qubit: q,
                                    matrix: merged,
                                })
                            }
                        }
                        continue;
                    }
                }
                stacks[q].push(slots.len());
                slots.push(Some(g.clone()));
            }
            Gate::Cnot { control, target } => {
                let (a, b) = (stacks[*control].last(), stacks[*target].last());
                if let (Some(&a), Some(&b)) = (a, b) {
                    if a == b && slots[a].as_ref() == Some(g) {
                        slots[a] = None;
                        stacks[*control].pop();
                        stacks[*target].pop();
                        continue;
                    }
                }
                stacks[*control].push(slots.len());
                stacks[*target].push(slots.len());
                slots.push(Some(g.clone()));
            }
        }
    }
    Circuit {
        n: c.n,
        gates: slots.into_iter().flatten().collect(),
        global_phase: phase,
    }
}

/// Text form: `qubits <n>`, an optional `phase <φ>`, then one gate per line,
/// `U <q> <8 floats>` (row-major re/im pairs) or `CNOT <c> <t>`.
pub fn to_circuit_text(c: &Circuit) -> String {
    let mut out = format!("qubits {}\n", c.n);
    if c.global_phase != 0.0 {
        let _ = writeln!(out, "phase {:.16e}", c.global_phase);
    }
    for g in &c.gates {
        match g {
            Gate::U { qubit, matrix } => {
                let _ = write!(out, "U {qubit}");
                for z in matrix.iter().flatten() {
                    let _ = write!(out, " {:.16e} {:.16e}", z.re, z.im);
                }
                out.push('\n');
            }
            Gate::Cnot { control, target } => {
                let _ = writeln!(out, "CNOT {control} {target}");
            }
        }
    }
    out
}

pub fn parse_circuit_text(text: &str) -> Result<Circuit> {
    let mut circ: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(circ) = circ.as_mut() else {
            match fields.as_slice() {
                ["qubits", n] => {
                    let n = n.parse().map_err(|_| perr(format!("bad qubit count {n:?}")))?;
                    circ = Some(Circuit::new(n));
                    continue;
                }
                _ => return Err(perr("expected header `qubits <n>`".into())),
            }
        };
        let idx_of = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| perr(format!("bad qubit index {s:?}")))
        };
        let gate_err = |e: Error| perr(e.to_string());
        match fields.as_slice() {
            ["phase", p] => {
                let p: f64 = p.parse().map_err(|_| perr(format!("bad phase {p:?}")))?;
                circ.global_phase += p;
            }
            ["CNOT", a, b] => circ.push_cnot(idx_of(a)?, idx_of(b)?).map_err(gate_err)?,
            ["U", q, rest @ ..] if rest.len() == 8 => {
                let v = rest
                    .iter()
                    .map(|s| s.parse::<f64>().map_err(|_| perr(format!("bad number {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                let m = [[c(v[0], v[1]), c(v[2], v[3])], [c(v[4], v[5]), c(v[6], v[7])]];
                circ.push_u(idx_of(q)?, m).map_err(gate_err)?;
            }
            _ => return Err(perr(format!("unrecognized gate line {line:?}"))),
        }
    }
    circ.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing `qubits <n>` header".into(),
    })
}

pub fn save_circuit(c: &Circuit, path: impl AsRef<Path>) -> Result<()> {
    io::write_atomic(path, to_circuit_text(c).as_bytes())
}

pub fn load_circuit(path: impl AsRef<Path>) -> Result<Circuit> {
    parse_circuit_text(&io::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamlib::{build_hubbard, HubbardSpec};
    use crate::linalg::{operator_norm, pauli_sum_matrix};
    use crate::pauli::PauliWord;
    use crate::sim::circuit_unitary;
    use nalgebra::DMatrix;

    fn term(c: f64, s: &str) -> PauliTerm {
        PauliTerm::new(c, s.parse::<PauliWord>().unwrap())
    }

    /// exp(-iθP) = cos θ I - i sin θ P for a Pauli word P.
    fn pauli_exp(t: &PauliTerm, scale: f64) -> DMatrix<Complex64> {
        let n = t.word.n();
        let p = pauli_sum_matrix(&PauliSum::from_terms(n, [(1.0, t.word.clone())]).unwrap()).unwrap();
        let th = t.coefficient * scale;
        DMatrix::identity(1 << n, 1 << n) * c(th.cos(), 0.0) - p * c(0.0, th.sin())
    }

    #[test]
    fn single_z_rotation() {
        let circ = synth_pauli_exponential(&term(0.3, "Z"), 1.0).unwrap();
        assert_eq!(count_gates(&circ), GateCount { n_1q: 1, n_2q: 0, depth: 1 });
    }

    #[test]
    fn pauli_exponentials_match_matrix_oracle() {
        for (coef, w) in [(0.3, "ZZ"), (-0.7, "XIY"), (1.1, "YZX"), (0.25, "IYI"), (0.4, "XXYZ")] {
            let t = term(coef, w);
            let circ = synth_pauli_exponential(&t, 0.9).unwrap();
            let u = circuit_unitary(&circ).unwrap();
            assert!(operator_norm(&(u - pauli_exp(&t, 0.9))) < 1e-12, "{w}");
            let weight = t.word.weight() as u64;
            assert_eq!(circ.count().n_2q, 2 * (weight - 1));
        }
        let circ = synth_pauli_exponential(&term(1.0, "XIY"), 1.0).unwrap();
        let singles: Vec<usize> = circ
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::U { qubit, .. } => Some(*qubit),
                _ => None,
            })
            .collect();
        assert!(singles.contains(&0) && singles.contains(&2) && !singles.contains(&1));
    }

    #[test]
    fn identity_word_is_rejected() {
        assert!(matches!(
            synth_pauli_exponential(&term(1.0, "II"), 1.0),
            Err(Error::IdentityTerm)
        ));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_gates(&Circuit::new(3)), GateCount::default());
        let mut c1 = Circuit::new(2);
        c1.push_cnot(0, 1).unwrap();
        assert_eq!(count_gates(&c1), GateCount { n_1q: 0, n_2q: 1, depth: 1 });
    }

    #[test]
    fn controlled_cost_examples() {
        assert_eq!(controlled_trotter_cost(1, &GateCount { n_1q: 1, n_2q: 0, depth: 0 }), 3);
        let base = GateCount { n_1q: 6_050_622, n_2q: 13_016_100, depth: 0 };
        assert_eq!(controlled_trotter_cost(50, &base), 4_812_423_300);
    }

    #[test]
    fn hubbard_naive_cnots() {
        let h = build_hubbard(&HubbardSpec::with_defaults(1, 2)).unwrap();
        let c = synth_trotter_step(&h, 1.0, 1, Strategy::Naive).unwrap();
        assert_eq!(c.count().n_2q, 6);
    }

    #[test]
    fn single_term_trotter_is_exact() {
        let h = PauliSum::from_terms(2, [(0.8, "XY".parse().unwrap())]).unwrap();
        for r in [1, 3, 8] {
            let u = circuit_unitary(&synth_trotter_step(&h, 0.7, r, Strategy::Naive).unwrap()).unwrap();
            assert!(operator_norm(&(u - pauli_exp(&term(0.8, "XY"), 0.7))) < 1e-12);
        }
    }

    #[test]
    fn empty_hamiltonian_gives_empty_circuit() {
        let h = PauliSum::zero(3).with_identity_offset(0.5);
        let c = synth_trotter_step(&h, 2.0, 4, Strategy::Cancel).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.global_phase(), -1.0);
    }

    #[test]
    fn strategy_validation() {
        let h = PauliSum::zero(1);
        assert!(synth_trotter_step(&h, 1.0, 0, Strategy::Naive).is_err());
        assert!(synth_trotter_step(&h, f64::NAN, 1, Strategy::Naive).is_err());
        assert!("fancy".parse::<Strategy>().is_err());
        assert_eq!("cancel".parse::<Strategy>().unwrap(), Strategy::Cancel);
    }

    #[test]
    fn peephole_cancels_and_merges() {
        let mut c0 = Circuit::new(2);
        c0.push_cnot(0, 1).unwrap();
        c0.push_u(1, hadamard()).unwrap();
        c0.push_u(1, hadamard()).unwrap();
        c0.push_cnot(0, 1).unwrap();
        c0.push_u(0, s_gate()).unwrap();
        c0.push_u(0, s_gate()).unwrap();
        let out = peephole(&c0);
        assert_eq!(out.len(), 1);
        let u0 = circuit_unitary(&c0).unwrap();
        let u1 = circuit_unitary(&out).unwrap();
        assert!(operator_norm(&(u0 - u1)) < 1e-12);
    }

    #[test]
    fn peephole_absorbs_scalar_gates_into_phase() {
        let mut c0 = Circuit::new(1);
        c0.push_u(0, rz(0.3)).unwrap();
        c0.push_u(0, [[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]).unwrap();
        c0.push_u(0, rz(-0.3)).unwrap();
        let out = peephole(&c0);
        assert!(out.is_empty());
        assert!((out.global_phase() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn circuit_text_round_trip() {
        let h = build_hubbard(&HubbardSpec::with_defaults(2, 2)).unwrap();
        let c0 = synth_trotter_step(&h, 0.3, 2, Strategy::Cancel).unwrap();
        let back = parse_circuit_text(&to_circuit_text(&c0)).unwrap();
        assert_eq!(back, c0);
        assert!(parse_circuit_text("qubits 2\nCNOT 0 0\n").is_err());
        assert!(matches!(
            parse_circuit_text("qubits 2\nU 0 1 0 0 0 0 0 2 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_circuit_text("CNOT 0 1\n").is_err());
    }

    #[test]
    fn push_validation() {
        let mut c0 = Circuit::new(2);
        assert!(c0.push_cnot(0, 2).is_err());
        assert!(c0.push_u(0, [[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]).is_err());
        assert!(c0.extend(&Circuit::new(3)).is_err());
    }
}
