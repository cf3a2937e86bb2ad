mod common;

use common::{c, hermitian, kron, matrix};
use proptest::prelude::*;
use qudit_tomography::matrix::{
    condition_number, hermitian_eigendecomposition, inverse, least_squares, singular_values,
    solve_linear, tensor, tensor_all,
};
use qudit_tomography::ComplexMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_vec(n, n, data).unwrap().hermitian_part()
}

proptest! {
    #[test]
    fn tensor_matches_kronecker_oracle(a in matrix(2, 3), b in matrix(3, 2)) {
        prop_assert!(tensor(&a, &b).max_abs_diff(&kron(&a, &b)) < 1e-15);
    }

    #[test]
    fn tensor_is_associative(a in matrix(2, 2), b in matrix(3, 1), cm in matrix(1, 2)) {
        let left = tensor(&tensor(&a, &b), &cm);
        let right = tensor(&a, &tensor(&b, &cm));
        prop_assert!(left.max_abs_diff(&right) < 1e-15);
        prop_assert!(tensor_all([&a, &b, &cm]).max_abs_diff(&left) < 1e-15);
    }

    #[test]
    fn tensor_is_bilinear(a in matrix(2, 2), b in matrix(2, 2), m in matrix(3, 3), s in -2.0f64..2.0) {
        let mut sum = a.scale_real(s);
        sum.add_scaled(c(1.0, 0.0), &b);
        let lhs = tensor(&sum, &m);
        let mut rhs = tensor(&a, &m).scale_real(s);
        rhs.add_scaled(c(1.0, 0.0), &tensor(&b, &m));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn tensor_trace_and_mixed_product(
        a in matrix(2, 2), b in matrix(3, 3), x in matrix(2, 2), y in matrix(3, 3)
    ) {
        let t = tensor(&a, &b).trace();
        prop_assert!((t - a.trace() * b.trace()).norm() < 1e-13);
        let lhs = tensor(&a, &b).matmul(&tensor(&x, &y));
        let rhs = tensor(&a.matmul(&x), &b.matmul(&y));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn eigendecomposition_reassembles(m in (1usize..10).prop_flat_map(hermitian)) {
        let eig = hermitian_eigendecomposition(&m).unwrap();
        prop_assert!(eig.reassemble().max_abs_diff(&m) < 1e-12);
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let v = &eig.vectors;
        let gram = v.adjoint().matmul(v);
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(m.rows())) < 1e-12);
    }

    #[test]
    fn square_solve_has_small_residual(a in matrix(6, 6), b in prop::collection::vec(-1.0f64..1.0, 6)) {
        // Diagonal shift keeps the system comfortably nonsingular.
        let mut a = a;
        a.add_scaled(c(4.0, 0.0), &ComplexMatrix::identity(6));
        let rhs: Vec<_> = b.iter().map(|&v| c(v, 0.0)).collect();
        let sol = solve_linear(&a, &rhs).unwrap();
        let back = a.matvec(&sol.x);
        let residual: f64 = back.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        prop_assert!(residual < 1e-12);
        prop_assert!(sol.condition >= 1.0);
    }

    #[test]
    fn least_squares_normal_equations(a in matrix(9, 4), b in prop::collection::vec(-1.0f64..1.0, 9)) {
        let rhs: Vec<_> = b.iter().map(|&v| c(v, 0.0)).collect();
        let sol = least_squares(&a, &rhs).unwrap();
        let r: Vec<_> = a.matvec(&sol.x).iter().zip(&rhs).map(|(p, q)| p - q).collect();
        // The residual is orthogonal to the column space.
        let ar = a.adjoint().matvec(&r);
        prop_assert!(ar.iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn pseudo_inverse_of_tall_matrix(a in matrix(7, 3)) {
        let (pinv, kappa) = inverse(&a).unwrap();
        let prod = pinv.matmul(&a);
        prop_assert!(prod.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-9 * kappa.max(1.0));
    }

    #[test]
    fn singular_values_of_scaled_unitary(n in 1usize..8, s in 0.1f64..10.0, seed in any::<u64>()) {
        let u = hermitian_eigendecomposition(&random_hermitian(n, seed)).unwrap().vectors;
        let sv = singular_values(&u.scale_real(s));
        prop_assert!(sv.iter().all(|v| (v - s).abs() < 1e-10 * s));
        prop_assert!((condition_number(&u) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn eigendecomposition_up_to_81() {
    for (n, seed) in [(27, 1), (32, 2), (81, 3)] {
        let m = random_hermitian(n, seed);
        let eig = hermitian_eigendecomposition(&m).unwrap();
        assert!(eig.reassemble().max_abs_diff(&m) < 1e-12, "n = {n}");
        let v = &eig.vectors;
        assert!(v.adjoint().matmul(v).max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        for k in [0, n / 2, n - 1] {
            let col = v.column(k);
            let mv = m.matvec(&col);
            let err = mv
                .iter()
                .zip(&col)
                .map(|(p, q)| (p - q * eig.values[k]).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "n = {n}, k = {k}: {err}");
        }
    }
}

#[test]
fn singular_matrices_are_rejected() {
    let mut a = ComplexMatrix::identity(3);
    a[(2, 2)] = c(0.0, 0.0);
    assert!(inverse(&a).is_err());
    assert!(solve_linear(&a, &[c(1.0, 0.0); 3]).is_err());
}
