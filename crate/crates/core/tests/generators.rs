mod common;

use common::c;
use proptest::prelude::*;
use qudit_tomography::generators::{gram_matrix, lambda_basis, tensor_basis, tensor_basis_with_cap};
use qudit_tomography::matrix::tensor_all;
use qudit_tomography::states::{
    from_bloch, named_state, random_physical_state, to_bloch, BlochVector, PurityClass,
};
use qudit_tomography::ComplexMatrix;

#[test]
fn single_qudit_algebra() {
    for d in 2..=6 {
        let basis = lambda_basis(d).unwrap();
        assert_eq!(basis.len(), d * d);
        let g = gram_matrix(basis.operators());
        for (j, op) in basis.operators().iter().enumerate() {
            assert!(op.hermitian_deviation() == 0.0, "d = {d}, λ{j}");
            if j > 0 {
                assert!(op.trace().norm() < 1e-15, "d = {d}, λ{j}");
            }
        }
        for i in 0..d * d {
            for j in 0..d * d {
                let expected = match (i, j) {
                    (0, 0) => d as f64,
                    _ if i == j => 2.0,
                    _ => 0.0,
                };
                assert!((g[(i, j)] - c(expected, 0.0)).norm() < 1e-14, "d = {d} ({i}, {j})");
            }
        }
    }
}

#[test]
fn tensor_basis_is_lexicographic() {
    for (d, n) in [(2, 2), (2, 3), (3, 2)] {
        let single = lambda_basis(d).unwrap();
        let basis = tensor_basis(d, n).unwrap();
        assert_eq!(basis.len(), (d * d).pow(n as u32));
        for flat in 0..basis.len() {
            let idx = basis.multi_index(flat);
            let expected = tensor_all(idx.iter().map(|&j| single.get(j)));
            assert!(basis.get(flat).max_abs_diff(&expected) == 0.0);
            let actual_norm = basis.get(flat).trace_product(basis.get(flat)).re;
            assert!((actual_norm - basis.norm_sqr(flat)).abs() < 1e-12);
        }
    }
}

#[test]
fn tensor_cap_is_enforced() {
    assert!(tensor_basis(2, 5).is_ok());
    assert!(tensor_basis(2, 6).is_err());
    assert!(tensor_basis_with_cap(2, 6, 64).is_ok());
    assert!(lambda_basis(1).is_err());
}

#[test]
fn pure_states_sit_on_the_bloch_sphere() {
    for d in 2..=6 {
        for seed in 0..20 {
            let rho = random_physical_state(d, 1, seed, PurityClass::Pure);
            let b = to_bloch(&rho).unwrap();
            let bound = (d * (d - 1)) as f64 / 2.0;
            assert!((b.length_sqr() - bound).abs() < 1e-10, "d = {d}, seed {seed}");
            let mixed = random_physical_state(d, 1, seed, PurityClass::Mixed);
            assert!(to_bloch(&mixed).unwrap().length_sqr() < bound);
        }
    }
}

#[test]
fn bloch_vector_rejects_wrong_shapes() {
    assert!(BlochVector::new(2, 1, vec![1.0, 0.0, 0.0]).is_err());
    assert!(BlochVector::new(2, 1, vec![0.5, 0.0, 0.0, 0.0]).is_err());
    assert!(BlochVector::new(2, 1, vec![1.0, f64::NAN, 0.0, 0.0]).is_err());
}

#[test]
fn expansion_of_any_hermitian_matrix() {
    // Completeness: X = Σ_j Tr[X λ_j] λ_j / Tr[λ_j²].
    let d = 4;
    let basis = lambda_basis(d).unwrap();
    let x = random_physical_state(d, 1, 3, PurityClass::Mixed).into_matrix();
    let mut sum = ComplexMatrix::zeros(d, d);
    for (j, op) in basis.operators().iter().enumerate() {
        sum.add_scaled(x.trace_product(op) / basis.norm_sqr(j), op);
    }
    assert!(sum.max_abs_diff(&x) < 1e-14);
}

proptest! {
    #[test]
    fn bloch_round_trip(d in 2usize..=5, n in 1usize..=2, seed in any::<u64>(), pure in any::<bool>()) {
        prop_assume!(d.pow(n as u32) <= 32);
        let class = if pure { PurityClass::Pure } else { PurityClass::Mixed };
        let rho = random_physical_state(d, n, seed, class);
        let b = to_bloch(&rho).unwrap();
        prop_assert!((b.coefficients()[0] - 1.0).abs() < 1e-12);
        let back = from_bloch(&b).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-13);
    }

    #[test]
    fn named_qutrit_states_are_pure(k in 0usize..3, a in 0usize..3, b in 0usize..3) {
        let ket = named_state(&format!("ket{k}"), 3, 1).unwrap();
        let bal = named_state(&format!("bal{a}{b}"), 3, 1).unwrap();
        prop_assert!((ket.purity() - 1.0).abs() < 1e-12);
        prop_assert!((bal.purity() - 1.0).abs() < 1e-12);
    }
}
