//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is the carrier for every operator and state in the
//! crate. Storage is row-major `Complex64`. Arithmetic, adjoint, trace and
//! the Kronecker product are implemented here directly; the Hermitian
//! eigendecomposition and the SVD-backed linear solve delegate to
//! `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `max |m - m†|` for Hermiticity checks.
pub const TOL_HERMITIAN: f64 = 1e-9;
/// Tolerance on `max |V†V - I|` for eigenvector unitarity.
pub const TOL_UNITARY: f64 = 1e-9;
/// Relative residual tolerance for linear solves.
pub const TOL_SOLVE: f64 = 1e-10;

const EIGEN_MAX_SWEEPS: usize = 10_000;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Wire form: `{"rows": R, "cols": C, "entries": [[re, im], ...]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let data = json
            .entries
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        ComplexMatrix::from_vec(json.rows, json.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths,
    /// empty shapes and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("rows/cols", "must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(
                "entries",
                format!("expected {} entries, found {}", rows * cols, data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(
                format!("entries[{pos}]"),
                "entries must be finite",
            ));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        ComplexMatrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.concat(),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `|ψ⟩⟨ψ|` for a ket given as a slice.
    pub fn outer(ket: &[Complex64]) -> Self {
        let n = ket.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Hilbert–Schmidt inner product `Tr[self† · other]`.
    pub fn inner(&self, other: &ComplexMatrix) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m - m†|`, or infinity for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&adj.data) {
            *a = (*a + b) * 0.5;
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        let (rows, cols) = m.shape();
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product: `(a⊗b)[i·rb + k, j·cb + l] = a[i,j]·b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter.next().expect("tensor_all needs at least one factor").clone();
    iter.fold(first, |acc, f| tensor(&acc, f))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V · diag(f(w)) · V†`.
    pub fn reassemble_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            if fw == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * fw;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reassemble(&self) -> ComplexMatrix {
        self.reassemble_with(|w| w)
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > TOL_HERMITIAN {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = nalgebra::SymmetricEigen::try_new(
        m.hermitian_part().to_nalgebra(),
        f64::EPSILON,
        EIGEN_MAX_SWEEPS,
    )
    .ok_or(Error::ConvergenceFailure)?;

    let n = m.rows;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = eig.eigenvectors[(i, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Result of [`solve_linear`].
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Vec<Complex64>,
    /// Ratio of largest to smallest singular value of the system matrix.
    pub condition: f64,
}

/// Singular values, descending, as square roots of the eigenvalues of the
/// smaller of `a†a` and `a a†`.
///
/// nalgebra's SVD loses accuracy (errors near 1e-4) on matrices with
/// clustered singular values, which the A-matrices of symmetric measurement
/// sets have; the Hermitian eigensolver does not. Values below
/// `√ε · σ_max` are not resolved.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let gram = if a.rows >= a.cols {
        a.adjoint().matmul(a)
    } else {
        a.matmul(&a.adjoint())
    };
    match hermitian_eigendecomposition(&gram.hermitian_part()) {
        Ok(eig) => eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect(),
        Err(_) => vec![f64::NAN; a.rows.min(a.cols)],
    }
}

/// 2-norm condition number; infinite for a rank-deficient matrix.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    let s = singular_values(a);
    let (max, min) = (s[0], *s.last().unwrap());
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Smallest singular value treated as nonzero.
fn rank_tolerance(a: &ComplexMatrix, smax: f64) -> f64 {
    smax * (f64::EPSILON * a.rows.max(a.cols) as f64).sqrt()
}

/// Solves the square system `a · x = b`.
///
/// Fails with [`Error::Singular`] when the smallest singular value falls
/// below `√(max(rows, cols) · ε) · σ_max`.
pub fn solve_linear(a: &ComplexMatrix, b: &[Complex64]) -> Result<LinearSolution> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    least_squares(a, b)
}

/// Least-squares solution of `a · x ≈ b` for a matrix of full column rank,
/// or the minimum-norm solution for one of full row rank.
pub fn least_squares(a: &ComplexMatrix, b: &[Complex64]) -> Result<LinearSolution> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    let (pinv, condition) = inverse(a)?;
    Ok(LinearSolution {
        x: pinv.matvec(b),
        condition,
    })
}

/// Inverse of a square matrix (LU), or the pseudo-inverse of a full-rank
/// rectangular one (QR), with the condition number.
pub fn inverse(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let s = singular_values(a);
    let (smax, smin) = (s[0], *s.last().unwrap());
    let condition = if smin == 0.0 { f64::INFINITY } else { smax / smin };
    if !(smin > rank_tolerance(a, smax)) {
        return Err(Error::Singular { condition });
    }
    let singular = || Error::Singular { condition };
    let m = a.to_nalgebra();
    let inv = if a.is_square() {
        m.lu().try_inverse().ok_or_else(singular)?
    } else if a.rows > a.cols {
        tall_pseudo_inverse(m).ok_or_else(singular)?
    } else {
        tall_pseudo_inverse(m.adjoint()).ok_or_else(singular)?.adjoint()
    };
    Ok((ComplexMatrix::from_nalgebra(&inv), condition))
}

/// `R⁻¹ Q†` from a thin QR factorization of a tall matrix.
fn tall_pseudo_inverse(m: DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let qr = m.qr();
    let q_adj = qr.q().adjoint();
    qr.r().solve_upper_triangular(&q_adj)
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn z_tensor_z_is_diagonal() {
        let zz = tensor(&pauli_z(), &pauli_z());
        assert_eq!(zz, ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn tensor_of_rectangular_shapes() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)]]);
        let b = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)], vec![c(3.0, 0.0)]]);
        let ab = tensor(&a, &b);
        assert_eq!((ab.rows(), ab.cols()), (2, 2));
        assert_eq!(ab[(0, 1)], c(0.0, 2.0));
        assert_eq!(ab[(1, 0)], c(3.0, 0.0));
    }

    #[test]
    fn eigen_of_diagonal() {
        let eig = hermitian_eigendecomposition(&pauli_z()).unwrap();
        assert_eq!(eig.values, vec![1.0, -1.0]);
    }

    #[test]
    fn eigen_of_plus_projector() {
        // ½(I + X) has characteristic polynomial w² - w = 0.
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.5, 0.0), c(0.5, 0.0)],
        ]);
        let eig = hermitian_eigendecomposition(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!(eig.values[1].abs() < 1e-14);
        let v = eig.vectors.column(0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Eigenvectors are defined up to a phase.
        let phase = v[0] / v[0].norm();
        assert!((v[0] / phase - c(s, 0.0)).norm() < 1e-12);
        assert!((v[1] / phase - c(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(matches!(
            hermitian_eigendecomposition(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5)];
        let sol = solve_linear(&ComplexMatrix::identity(2), &b).unwrap();
        assert!((sol.x[0] - b[0]).norm() < 1e-15 && (sol.x[1] - b[1]).norm() < 1e-15);
        assert!((sol.condition - 1.0).abs() < 1e-12);

        let d = ComplexMatrix::from_real_diagonal(&[2.0, 4.0]);
        let sol = solve_linear(&d, &[c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert!((sol.x[0] - ONE).norm() < 1e-15 && (sol.x[1] - ONE).norm() < 1e-15);
        assert!((sol.condition - 2.0).abs() < 1e-12);
    }

    #[test]
    fn solve_detects_singular() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            solve_linear(&m, &[ONE, ONE]),
            Err(Error::Singular { .. })
        ));
        assert!(condition_number(&m).is_infinite());
    }

    #[test]
    fn from_vec_validates() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::from_vec(0, 1, vec![]).is_err());
    }

    #[test]
    fn json_round_trip_and_schema() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, -2.0), c(0.5, 0.0)]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[[1.0,-2.0],[0.5,0.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":2,"entries":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }
}
