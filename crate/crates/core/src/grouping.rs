//! Commuting measurement groups and shot-count estimates.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliWord};
use crate::sim::{self, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    QubitWise,
    Full,
}

impl Relation {
    pub fn compatible(self, a: &PauliWord, b: &PauliWord) -> bool {
        match self {
            Relation::QubitWise => a.qubit_wise_commutes(b),
            Relation::Full => a.commutes(b),
        }
        .unwrap_or(false)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::QubitWise => "qubit-wise",
            Relation::Full => "full",
        })
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubit-wise" | "qwc" => Ok(Relation::QubitWise),
            "full" => Ok(Relation::Full),
            other => Err(Error::invalid(format!(
                "unknown relation {other:?} (expected qubit-wise or full)"
            ))),
        }
    }
}

/// Partition of the non-identity terms of a [`PauliSum`]; each group lists
/// term indices in insertion order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementGroups {
    relation: Relation,
    groups: Vec<Vec<usize>>,
}

impl MeasurementGroups {
    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Checks disjointness, coverage of every term of `h`, and pairwise
    /// compatibility inside each group.
    pub fn validate(&self, h: &PauliSum) -> Result<()> {
        let mut seen = vec![false; h.len()];
        for g in &self.groups {
            for &i in g {
                if i >= seen.len() || seen[i] {
                    return Err(Error::invalid(format!("term {i} is missing or repeated")));
                }
                seen[i] = true;
            }
            for (a, &i) in g.iter().enumerate() {
                for &j in &g[a + 1..] {
                    if !self.relation.compatible(&h.terms()[i].word, &h.terms()[j].word) {
                        return Err(Error::invalid(format!(
                            "terms {i} and {j} share a group but are not compatible"
                        )));
                    }
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("term {i} is not in any group")));
        }
        Ok(())
    }
}

/// Letters fixed by the members of a qubit-wise group. Compatibility with the
/// whole group reduces to qubit-wise commutation with this single word.
struct Signature {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl Signature {
    fn new(w: &PauliWord) -> Self {
        Signature {
            x: w.x_blocks().to_vec(),
            z: w.z_blocks().to_vec(),
        }
    }

    fn admits(&self, w: &PauliWord) -> bool {
        let (wx, wz) = (w.x_blocks(), w.z_blocks());
        (0..self.x.len()).all(|b| {
            let overlap = (self.x[b] | self.z[b]) & (wx[b] | wz[b]);
            overlap & ((self.x[b] ^ wx[b]) | (self.z[b] ^ wz[b])) == 0
        })
    }

    fn absorb(&mut self, w: &PauliWord) {
        for b in 0..self.x.len() {
            self.x[b] |= w.x_blocks()[b];
            self.z[b] |= w.z_blocks()[b];
        }
    }
}

/// Greedy sorted insertion: terms by descending |c| (ties by word order),
/// each placed in the first compatible group or a new one.
pub fn sorted_insertion_group(h: &PauliSum, relation: Relation) -> MeasurementGroups {
    let terms = h.terms();
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| {
        terms[b]
            .coefficient
            .abs()
            .total_cmp(&terms[a].coefficient.abs())
            .then_with(|| terms[a].word.cmp(&terms[b].word))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut signatures: Vec<Signature> = Vec::new();
    for i in order {
        let w = &terms[i].word;
        let slot = match relation {
            Relation::QubitWise => signatures.iter().position(|s| s.admits(w)),
            Relation::Full => groups
                .iter()
                .position(|g| g.iter().all(|&j| w.commutes(&terms[j].word).unwrap_or(false))),
        };
        match slot {
            Some(g) => {
                groups[g].push(i);
                if relation == Relation::QubitWise {
                    signatures[g].absorb(w);
                }
            }
            None => {
                groups.push(vec![i]);
                if relation == Relation::QubitWise {
                    signatures.push(Signature::new(w));
                }
            }
        }
    }
    MeasurementGroups { relation, groups }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub epsilon: f64,
    pub per_group_sigma: Vec<f64>,
    pub total_shots: u64,
}

/// `ceil(x)`, except that values within 1e-9 (relative) of an integer round
/// to it, so that `sqrt` roundoff cannot add a spurious shot.
fn tolerant_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Shot estimate from per-term expectation values `⟨P_i⟩`.
pub fn shots_from_expectations(
    h: &PauliSum,
    groups: &MeasurementGroups,
    expectations: &[f64],
    epsilon: f64,
) -> Result<ShotEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if expectations.len() != h.len() {
        return Err(Error::Dimension {
            expected: h.len(),
            found: expectations.len(),
        });
    }
    let per_group_sigma: Vec<f64> = groups
        .groups()
        .iter()
        .map(|g| {
            g.iter()
                .map(|&i| {
                    let c = h.terms()[i].coefficient;
                    let e = expectations[i];
                    c * c * (1.0 - e * e).max(0.0)
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let total = per_group_sigma.iter().sum::<f64>() / epsilon;
    Ok(ShotEstimate {
        epsilon,
        total_shots: tolerant_ceil(total * total) as u64,
        per_group_sigma,
    })
}

/// Shots for energy estimation on `state`, neglecting covariances inside a group.
pub fn estimate_shots(
    h: &PauliSum,
    groups: &MeasurementGroups,
    state: &StateVector,
    epsilon: f64,
) -> Result<ShotEstimate> {
    if state.n() != h.n() {
        return Err(Error::Dimension {
            expected: h.n(),
            found: state.n(),
        });
    }
    state.check_normalized()?;
    let expectations = h
        .terms()
        .par_iter()
        .map(|t| sim::pauli_expectation(state, &t.word))
        .collect::<Result<Vec<_>>>()?;
    shots_from_expectations(h, groups, &expectations, epsilon)
}

/// Worst case over states: every `⟨P_i⟩ = 0`.
pub fn maximally_mixed_shot_bound(
    h: &PauliSum,
    groups: &MeasurementGroups,
    epsilon: f64,
) -> Result<ShotEstimate> {
    shots_from_expectations(h, groups, &vec![0.0; h.len()], epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamlib::{build_hubbard, HubbardSpec};

    fn sum(n: usize, terms: &[(f64, &str)]) -> PauliSum {
        PauliSum::from_terms(n, terms.iter().map(|(c, w)| (*c, w.parse::<PauliWord>().unwrap()))).unwrap()
    }

    fn words(h: &PauliSum, g: &MeasurementGroups) -> Vec<Vec<String>> {
        g.groups()
            .iter()
            .map(|grp| grp.iter().map(|&i| h.terms()[i].word.to_string()).collect())
            .collect()
    }

    #[test]
    fn qubit_wise_greedy_trace() {
        let h = sum(2, &[(0.2, "XI"), (1.0, "ZI"), (0.5, "ZZ")]);
        let g = sorted_insertion_group(&h, Relation::QubitWise);
        assert_eq!(words(&h, &g), [vec!["ZI", "ZZ"], vec!["XI"]]);
        g.validate(&h).unwrap();
    }

    #[test]
    fn full_versus_qubit_wise() {
        let h = sum(2, &[(1.0, "XX"), (1.0, "ZZ")]);
        assert_eq!(sorted_insertion_group(&h, Relation::Full).len(), 1);
        assert_eq!(sorted_insertion_group(&h, Relation::QubitWise).len(), 2);
        let h = sum(1, &[(0.3, "Y")]);
        assert_eq!(sorted_insertion_group(&h, Relation::Full).len(), 1);
    }

    #[test]
    fn qubit_wise_signature_matches_pairwise_check() {
        let h = build_hubbard(&HubbardSpec::with_defaults(3, 3)).unwrap();
        let g = sorted_insertion_group(&h, Relation::QubitWise);
        g.validate(&h).unwrap();
        let full = sorted_insertion_group(&h, Relation::Full);
        full.validate(&h).unwrap();
        assert!(full.len() <= g.len());
    }

    #[test]
    fn validate_detects_bad_partitions() {
        let h = sum(2, &[(1.0, "XX"), (1.0, "ZZ")]);
        let bad = MeasurementGroups {
            relation: Relation::QubitWise,
            groups: vec![vec![0, 1]],
        };
        assert!(bad.validate(&h).is_err());
        let missing = MeasurementGroups {
            relation: Relation::Full,
            groups: vec![vec![0]],
        };
        assert!(missing.validate(&h).is_err());
    }

    #[test]
    fn shot_examples() {
        let z = sum(1, &[(1.0, "Z")]);
        let g = sorted_insertion_group(&z, Relation::Full);
        let zero = StateVector::zero_state(1).unwrap();
        assert_eq!(estimate_shots(&z, &g, &zero, 1e-3).unwrap().total_shots, 0);
        assert_eq!(maximally_mixed_shot_bound(&z, &g, 3e-3).unwrap().total_shots, 111_112);

        let x = sum(1, &[(1.0, "X")]);
        let g = sorted_insertion_group(&x, Relation::Full);
        let est = estimate_shots(&x, &g, &zero, 3e-3).unwrap();
        assert_eq!(est.per_group_sigma, vec![1.0]);
        assert_eq!(est.total_shots, 111_112);

        let pair = sum(2, &[(0.6, "ZI"), (0.8, "IZ")]);
        let g = sorted_insertion_group(&pair, Relation::QubitWise);
        assert_eq!(g.len(), 1);
        let mm = maximally_mixed_shot_bound(&pair, &g, 1.0).unwrap();
        assert!((mm.per_group_sigma[0] - 1.0).abs() < 1e-15);
        assert_eq!(mm.total_shots, 1);
    }

    #[test]
    fn epsilon_must_be_positive() {
        let z = sum(1, &[(1.0, "Z")]);
        let g = sorted_insertion_group(&z, Relation::Full);
        assert!(maximally_mixed_shot_bound(&z, &g, 0.0).is_err());
        assert!(maximally_mixed_shot_bound(&z, &g, -1.0).is_err());
    }

    #[test]
    fn relation_parsing() {
        assert_eq!("qubit-wise".parse::<Relation>().unwrap(), Relation::QubitWise);
        assert_eq!(Relation::Full.to_string(), "full");
        assert!("none".parse::<Relation>().is_err());
    }
}
