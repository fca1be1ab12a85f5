mod common;

use common::*;
use proptest::prelude::*;
use qre_core::adapt::{self, StopCriteria};
use qre_core::optimize::BfgsOptions;
use qre_core::sim::{self, StateVector};

fn number_operator(n: usize) -> CMat {
    let dim = 1 << n;
    CMat::from_fn(dim, dim, |i, j| {
        if i == j {
            c(i.count_ones() as f64, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

#[test]
fn pool_sizes_and_generators() {
    for n in 2..=6 {
        let pool = adapt::build_qe_pool(n).unwrap();
        let singles = n * (n - 1) / 2;
        let doubles = if n < 4 { 0 } else { n * (n - 1) * (n - 2) * (n - 3) / 8 };
        assert_eq!(pool.len(), singles + doubles, "n={n}");
        let num = number_operator(n);
        for op in &pool {
            let g = sum_matrix(&op.generator);
            assert!(op_norm(&(&g - g.adjoint())) < 1e-14, "{}", op.label);
            // e^{iθG} is a real rotation
            assert!(g.iter().all(|z| z.re.abs() < 1e-15), "{}", op.label);
            assert!(op_norm(&(&g * &num - &num * &g)) < 1e-14, "{}", op.label);
            assert!(op.generator.terms().iter().all(|t| {
                t.word.support().iter().all(|q| op.support.contains(q))
            }));
        }
    }
    assert!(adapt::build_qe_pool(1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ansatz_state_matches_dense_exponentials(n in 2usize..5, picks in proptest::collection::vec((0usize..100, -3.0..3.0f64), 1..5), k in 0usize..16) {
        let pool = adapt::build_qe_pool(n).unwrap();
        let ops: Vec<_> = picks.iter().map(|(i, _)| &pool[i % pool.len()]).collect();
        let thetas: Vec<f64> = picks.iter().map(|p| p.1).collect();
        let reference = StateVector::basis(n, k % (1 << n)).unwrap();
        let got = adapt::ansatz_state(&reference, &ops, &thetas).unwrap();
        let mut v = nalgebra::DVector::from_vec(reference.amplitudes().to_vec());
        for (op, th) in ops.iter().zip(&thetas) {
            // e^{iθG} = e^{-i(-θ)G}
            v = expm_hermitian(&sum_matrix(&op.generator), -th) * v;
        }
        for (a, b) in got.amplitudes().iter().zip(v.iter()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        prop_assert_eq!(adapt::particle_number(&got).unwrap(), adapt::particle_number(&reference).unwrap());
    }

    #[test]
    fn gradient_matches_finite_difference(n in 2usize..5, idx in 0usize..100, seed in 0u64..1000) {
        let h = random_sum(seed, n, 8);
        let pool = adapt::build_qe_pool(n).unwrap();
        let op = &pool[idx % pool.len()];
        let psi = sim::prepare_overlap_state(&h, 0.5, seed).unwrap();
        let g = adapt::operator_gradient(&h, &psi, op).unwrap();
        let e = |th: f64| sim::expectation(&adapt::ansatz_state(&psi, &[op], &[th]).unwrap(), &h).unwrap();
        let step = 1e-5;
        let fd = (e(step) - e(-step)) / (2.0 * step);
        prop_assert!((g - fd).abs() < 1e-7 * (1.0 + g.abs()), "{} vs {}", g, fd);
    }
}

fn run(h: &qre_core::pauli::PauliSum, particles: usize) -> (StateVector, adapt::AdaptState) {
    let reference = adapt::occupied_reference(h.n(), particles).unwrap();
    let pool = adapt::build_qe_pool(h.n()).unwrap();
    let state = adapt::adapt_run(h, &reference, &pool, StopCriteria::default(), BfgsOptions::default()).unwrap();
    (reference, state)
}

#[test]
fn runs_are_monotone_and_circuits_reproduce_the_state() {
    for (h, particles) in [(hubbard(1, 2), 1), (hubbard(2, 2), 2), (hubbard(1, 4), 2), (heisenberg(4), 2)] {
        let (reference, st) = run(&h, particles);
        let e0 = hermitian_eigenvalues(&sum_matrix(&h))[0];
        assert!(st.energy >= e0 - 1e-9);
        for w in st.trace.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-10);
            assert!(w[1].n_2q_cumulative >= w[0].n_2q_cumulative);
        }
        let psi = st.state(&reference).unwrap();
        assert!((sim::expectation(&psi, &h).unwrap() - st.energy).abs() < 1e-9);
        let c = adapt::ansatz_circuit(&st).unwrap();
        let via_circuit = sim::apply_circuit(&reference, &c).unwrap();
        assert!(1.0 - via_circuit.fidelity(&psi).unwrap() <= 1e-8);
        assert_eq!(adapt::particle_number(&psi).unwrap(), particles);
        if let Some(last) = st.trace.last() {
            assert_eq!(last.n_2q_cumulative, adapt::ansatz_gate_count(&st).unwrap().n_2q);
        }
    }
}

#[test]
fn hubbard_two_by_two_reaches_the_ground_state() {
    let h = hubbard(2, 2);
    let (_, g) = sim::ground_state(&h).unwrap();
    let (_, st) = run(&h, adapt::particle_number(&g).unwrap());
    let e0 = hermitian_eigenvalues(&sum_matrix(&h))[0];
    assert!((st.energy - e0).abs() < 1e-6, "{} vs {e0}", st.energy);
}

#[test]
fn trace_csv_round_trip() {
    let (_, st) = run(&hubbard(2, 2), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    adapt::write_trace(&st.trace, &path).unwrap();
    assert_eq!(adapt::read_trace(&path).unwrap(), st.trace);
    let text = adapt::trace_to_csv(&st.trace).unwrap();
    assert!(text.starts_with("iter,selected_label,gradient,energy,n_2q_cumulative"));
}

#[test]
fn reference_errors() {
    assert!(adapt::occupied_reference(3, 4).is_err());
    let h = hubbard(1, 2);
    let pool = adapt::build_qe_pool(3).unwrap();
    let bad = adapt::occupied_reference(3, 1).unwrap();
    assert!(adapt::adapt_run(&h, &bad, &pool, StopCriteria::default(), BfgsOptions::default()).is_err());
}
