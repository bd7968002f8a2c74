//! Property tests of the state-vector / density-matrix core against an
//! independent dense-matrix implementation.

use loopsim_core::protocol::{fusion_even, fusion_odd};
use loopsim_core::qcore::{MeasurementBasis, Pauli, PauliString, QuantumState, SingleQubitGate};
use loopsim_core::C64;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn pauli_matrix(p: Pauli) -> DMatrix<C64> {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

fn string_matrix(p: &PauliString) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, p.phase().to_complex());
    for &l in p.letters() {
        m = m.kronecker(&pauli_matrix(l));
    }
    m
}

fn gate_matrix(g: &SingleQubitGate) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[g.m[0][0], g.m[0][1], g.m[1][0], g.m[1][1]])
}

fn embed(g: &DMatrix<C64>, q: usize, n: usize) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for k in 0..n {
        let f = if k == q { g.clone() } else { DMatrix::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

fn letter() -> impl Strategy<Value = Pauli> {
    prop::sample::select(Pauli::ALL.to_vec())
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(letter(), n).prop_map(PauliString::new)
}

fn state(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

fn sized_state() -> impl Strategy<Value = (usize, Vec<C64>)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), state(n)))
}

fn gate() -> impl Strategy<Value = SingleQubitGate> {
    prop::collection::vec((0usize..5, -4.0f64..4.0), 1..6).prop_map(|ops| {
        ops.into_iter().fold(SingleQubitGate::identity(), |acc, (k, phi)| {
            let g = match k {
                0 => SingleQubitGate::hadamard(),
                1 => SingleQubitGate::phase_z(phi),
                2 => SingleQubitGate::pauli_x(),
                3 => SingleQubitGate::pauli_y(),
                _ => SingleQubitGate::pauli_z(),
            };
            g.then_after(&acc)
        })
    })
}

fn basis() -> impl Strategy<Value = MeasurementBasis> {
    prop::sample::select(vec![MeasurementBasis::HV, MeasurementBasis::PM, MeasurementBasis::Y])
}

fn density_diff(a: &QuantumState, b: &QuantumState) -> f64 {
    a.to_density().max_abs_diff(&b.to_density())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn gate_products_stay_unitary(g in gate()) {
        prop_assert!(g.is_unitary());
        let m = gate_matrix(&g);
        let err = (&m * m.adjoint() - DMatrix::<C64>::identity(2, 2)).norm();
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn gates_agree_with_dense_matrices((n, amps) in sized_state(), g in gate(), q in 0usize..4) {
        let q = q % n;
        let mut s = QuantumState::from_amplitudes(amps).unwrap();
        let psi = DVector::from_column_slice(s.amplitudes().unwrap());
        s.apply_gate(q, &g).unwrap();
        let expected = embed(&gate_matrix(&g), q, n) * psi;
        let got = s.amplitudes().unwrap();
        for (a, b) in got.iter().zip(expected.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_and_mixed_evolution_agree((n, amps) in sized_state(), g in gate(), q in 0usize..4) {
        let q = q % n;
        let pure = QuantumState::from_amplitudes(amps).unwrap();
        let mut mixed = pure.clone();
        mixed.make_mixed().unwrap();
        let mut pure = pure;
        pure.apply_gate(q, &g).unwrap();
        mixed.apply_gate(q, &g).unwrap();
        prop_assert!(density_diff(&pure, &mixed) < 1e-12);
    }

    #[test]
    fn fusion_kraus_agrees_between_representations(amps in state(3), m in 0.0f64..=1.0) {
        let mut pure = QuantumState::from_amplitudes(amps).unwrap();
        let mut mixed = pure.clone();
        mixed.make_mixed().unwrap();
        let k0 = fusion_even().scale_real(((1.0 + m) / 2.0).sqrt());
        let k1 = fusion_odd().scale_real(((1.0 - m) / 2.0).sqrt());
        mixed.apply_kraus(1, 2, &[k0.clone(), k1.clone()]).unwrap();
        // For the pure state, mix the two Kraus branches by hand.
        let mut a = pure.clone();
        a.apply_two_qubit(1, 2, &k0).unwrap();
        pure.apply_two_qubit(1, 2, &k1).unwrap();
        let mut expected = a.to_density();
        expected = expected.add(&pure.to_density());
        prop_assert!(mixed.to_density().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn measurement_probabilities_are_complete((n, amps) in sized_state(), b in basis(), q in 0usize..4) {
        let q = q % n;
        let s = QuantumState::from_amplitudes(amps).unwrap();
        let p0 = s.outcome_probability(q, b, 0).unwrap();
        let p1 = s.outcome_probability(q, b, 1).unwrap();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
        prop_assert!(p0 >= -1e-15 && p1 >= -1e-15);
        if n > 1 {
            for (outcome, p) in [(0, p0), (1, p1)] {
                if p > 1e-9 {
                    let (pp, post) = s.project(q, b, outcome).unwrap();
                    prop_assert!((pp - p).abs() < 1e-12);
                    prop_assert!(post.is_normalized());
                    prop_assert_eq!(post.num_qubits(), n - 1);
                }
            }
        }
    }

    #[test]
    fn basis_populations_sum_to_one((n, amps) in sized_state(), bases in prop::collection::vec(basis(), 4)) {
        let mut s = QuantumState::from_amplitudes(amps).unwrap();
        let pops = s.basis_populations(&bases[..n]).unwrap();
        prop_assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        s.make_mixed().unwrap();
        let mixed = s.basis_populations(&bases[..n]).unwrap();
        for (a, b) in pops.iter().zip(&mixed) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn expectations_agree_with_dense_matrices((n, amps) in sized_state(), letters in prop::collection::vec(letter(), 4)) {
        let p = PauliString::new(letters[..n].to_vec());
        let s = QuantumState::from_amplitudes(amps).unwrap();
        let psi = DVector::from_column_slice(s.amplitudes().unwrap());
        let expected = (psi.adjoint() * string_matrix(&p) * &psi)[(0, 0)];
        let got = s.expectation_complex(&p).unwrap();
        prop_assert!((got - expected).norm() < 1e-12);
        let mut mixed = s.clone();
        mixed.make_mixed().unwrap();
        prop_assert!((mixed.expectation_complex(&p).unwrap() - expected).norm() < 1e-12);
    }

    #[test]
    fn pauli_products_match_matrix_products(a in pauli_string(3), b in pauli_string(3)) {
        let ab = a.product(&b).unwrap();
        let dense = string_matrix(&a) * string_matrix(&b);
        prop_assert!((string_matrix(&ab) - &dense).norm() < 1e-12);
        let ba = string_matrix(&b) * string_matrix(&a);
        prop_assert_eq!(a.commutes_with(&b), (dense - ba).norm() < 1e-12);
    }

    #[test]
    fn pauli_strings_round_trip_through_text(p in pauli_string(5)) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<PauliString>().unwrap(), p);
    }

    #[test]
    fn partial_trace_preserves_reduced_expectations((n, amps) in sized_state(), l in letter()) {
        prop_assume!(n >= 2);
        let s = QuantumState::from_amplitudes(amps).unwrap();
        let reduced = s.partial_trace(&[0]).unwrap();
        let mut full = vec![Pauli::I; n];
        full[0] = l;
        let lhs = s.expectation(&PauliString::new(full)).unwrap();
        let rhs = reduced.expectation(&PauliString::new(vec![l])).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}
