//! Trotter-error analysis and resource arithmetic for single-ancilla phase
//! estimation.
//!
//! For a product formula with step `δt` the ground-state energy shifts by
//! `⟨φ0|V2|φ0⟩ δt²` to leading order, where
//!
//! `V2 = -1/24 Σ_{μ<ν≤ν'} (1 - δ_{νν'}/2) [H_ν', [H_ν, H_μ]]`
//!
//! over an ordered list of single-Pauli terms `H_μ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{controlled_trotter_cost, GateCount};
use crate::error::{Error, Result};
use crate::hamlib;
use crate::pauli::{PauliSum, PauliWord};
use crate::report::{Provenance, ResourceReport};
use crate::sim::{self, StateVector};

/// Largest term count accepted by [`v2_exact`].
pub const V2_MAX_TERMS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum V2Form {
    /// Sums over the `2M` list `H_1 … H_M, H_M … H_1`. This is the
    /// leading shift of the symmetric product
    /// `e^{-iH_1 δt/2} ⋯ e^{-iH_M δt/2} e^{-iH_M δt/2} ⋯ e^{-iH_1 δt/2}`.
    Symmetric,
    /// Sums over the `M` list `H_1 … H_M` only.
    FirstOrder,
}

impl fmt::Display for V2Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            V2Form::Symmetric => "symmetric",
            V2Form::FirstOrder => "first-order",
        })
    }
}

impl FromStr for V2Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(V2Form::Symmetric),
            "first-order" => Ok(V2Form::FirstOrder),
            other => Err(Error::invalid(format!(
                "unknown V2 form {other:?} (expected symmetric or first-order)"
            ))),
        }
    }
}

/// `[P_b, P_a]` as `(factor, word)`, `None` when the words commute.
fn commutator(b: &PauliWord, a: &PauliWord) -> Option<(Complex64, PauliWord)> {
    if b.commutes(a).unwrap_or(true) {
        return None;
    }
    let (phase, w) = b.multiply(a).ok()?;
    Some((phase.to_complex() * 2.0, w))
}

/// `⟨φ0|V2|φ0⟩` for the terms of `h` in their stored order.
pub fn v2_exact(h: &PauliSum, ground: &StateVector, form: V2Form) -> Result<f64> {
    let m = h.len();
    if m > V2_MAX_TERMS {
        return Err(Error::invalid(format!(
            "v2_exact is limited to {V2_MAX_TERMS} terms, got {m}"
        )));
    }
    if ground.n() != h.n() {
        return Err(Error::Dimension {
            expected: h.n(),
            found: ground.n(),
        });
    }
    let mut list: Vec<(f64, &PauliWord)> = h.terms().iter().map(|t| (t.coefficient, &t.word)).collect();
    if form == V2Form::Symmetric {
        let rev: Vec<_> = list.iter().rev().copied().collect();
        list.extend(rev);
    }
    let len = list.len();
    let partial: Vec<f64> = (0..len.saturating_sub(1))
        .into_par_iter()
        .map(|mu| -> Result<f64> {
            let mut acc: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
            let (c_mu, p_mu) = list[mu];
            for nu in mu + 1..len {
                let (c_nu, p_nu) = list[nu];
                let Some((f1, inner)) = commutator(p_nu, p_mu) else {
                    continue;
                };
                for (nup, &(c_nup, p_nup)) in list.iter().enumerate().skip(nu) {
                    let Some((f2, w)) = commutator(p_nup, &inner) else {
                        continue;
                    };
                    let weight = if nup == nu { 0.5 } else { 1.0 };
                    *acc.entry(w).or_default() += f1 * f2 * (weight * c_mu * c_nu * c_nup);
                }
            }
            let mut total = 0.0;
            for (w, coeff) in acc {
                total += (coeff * sim::pauli_expectation(ground, &w)?).re;
            }
            Ok(total)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(-partial.iter().sum::<f64>() / 24.0)
}

/// `h_max³·M³/24` with `M` the non-identity term count.
pub fn v2_bound(h: &PauliSum) -> f64 {
    let m = h.len() as f64;
    h.max_abs_coefficient().powi(3) * m.powi(3) / 24.0
}

/// `ceil(log2(1/ε))`, at least 1.
pub fn circuit_count(epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok((1.0 / epsilon).log2().ceil().max(1.0) as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpeBoundReport {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub h_max: f64,
    pub epsilon: f64,
    pub e1_bound: f64,
    pub e1_exact: Option<f64>,
    /// The value that set `dt`.
    pub e1_used: f64,
    pub norm: f64,
    /// False when `norm` is the triangle-inequality bound, which makes `n_T`
    /// an upper estimate.
    pub norm_exact: bool,
    pub t: f64,
    pub dt: f64,
    #[serde(rename = "n_T")]
    pub n_t: u64,
    #[serde(rename = "n_C")]
    pub n_c: u64,
    #[serde(rename = "n_Q")]
    pub n_q: u64,
    pub trotter_base: GateCount,
    #[serde(rename = "n_2Q")]
    pub n_2q: u128,
    /// Measurement-group count of the Hamiltonian, for resource tables.
    #[serde(rename = "N_groups")]
    pub n_groups: Option<usize>,
}

impl QpeBoundReport {
    pub fn resources(&self) -> ResourceReport {
        ResourceReport {
            algorithm: "qpe".into(),
            n_q: self.n_q,
            n_c: self.n_c,
            n_1q: None,
            n_2q: self.n_2q,
            provenance_n_c: Provenance::Exact,
            provenance_n_2q: Provenance::EstimatedUpper,
        }
    }
}

/// Step length, step count and gate totals for evolution time
/// `t = π/(4‖H‖₂)`. `e1` is the magnitude of the energy-shift coefficient,
/// either [`v2_exact`] or [`v2_bound`].
pub fn qpe_plan(h: &PauliSum, epsilon: f64, e1: f64, trotter_base: &GateCount) -> Result<QpeBoundReport> {
    let n_c = circuit_count(epsilon)?;
    if !(e1 >= 0.0 && e1.is_finite()) {
        return Err(Error::invalid(format!("e1 must be non-negative, got {e1}")));
    }
    let (norm, norm_exact) = hamlib::spectral_norm_or_bound(h);
    if norm <= 0.0 {
        return Err(Error::invalid("the zero Hamiltonian has no phase to estimate"));
    }
    let t = std::f64::consts::PI / (4.0 * norm);
    let dt = if e1 == 0.0 { t } else { (epsilon / e1).sqrt() };
    let n_t = ((t / dt).ceil() as u64).max(1);
    Ok(QpeBoundReport {
        n: h.n(),
        m: h.len(),
        h_max: h.max_abs_coefficient(),
        epsilon,
        e1_bound: v2_bound(h),
        e1_exact: None,
        e1_used: e1,
        norm,
        norm_exact,
        t,
        dt,
        n_t,
        n_c,
        n_q: h.n() as u64 + 1,
        trotter_base: *trotter_base,
        n_2q: controlled_trotter_cost(n_t, trotter_base),
        n_groups: None,
    })
}

/// Resources for a given step count, bypassing the error analysis.
pub fn qpe_resources(n: usize, n_t: u64, epsilon: f64, trotter_base: &GateCount) -> Result<ResourceReport> {
    if n_t == 0 {
        return Err(Error::invalid("n_T must be at least 1"));
    }
    Ok(ResourceReport {
        algorithm: "qpe".into(),
        n_q: n as u64 + 1,
        n_c: circuit_count(epsilon)?,
        n_1q: None,
        n_2q: controlled_trotter_cost(n_t, trotter_base),
        provenance_n_c: Provenance::Exact,
        provenance_n_2q: Provenance::EstimatedUpper,
    })
}
