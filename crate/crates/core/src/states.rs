//! Density matrices, generalized Bloch vectors and a catalogue of named states.
//!
//! # Bloch convention
//!
//! A state of `n` qudits expands as
//!
//! ```text
//! ρ = (1 / d^n) Σ_J r_J Λ_J,      Λ_J = λ_{j1} ⊗ … ⊗ λ_{jn},   r_0 = 1
//! ```
//!
//! with the unscaled identity in slot 0. Because `Tr[λ_0²] = d` while
//! `Tr[λ_j²] = 2`, the coefficients are *not* the raw expectation values:
//!
//! ```text
//! r_J = (d / 2)^m · Tr[ρ Λ_J]       m = number of non-identity slots in J
//! ```
//!
//! For qubits the factor is 1 and `r_j = ⟨λ_j⟩`. For a qutrit it is `3/2`
//! per slot. Mixing up the two is the easiest way to get a wrong state out
//! of otherwise correct counts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{tensor_basis, GeneratorBasis};
use crate::matrix::{
    hermitian_eigendecomposition, tensor_all, vector_norm, ComplexMatrix, I, ONE, TOL_HERMITIAN,
    ZERO,
};

/// Allowed deviation of `Tr ρ` from 1.
pub const TOL_TRACE: f64 = 1e-9;
/// Most negative eigenvalue still counted as positive semidefinite.
pub const TOL_PSD: f64 = 1e-9;

/// A Hermitian, unit-trace matrix on `n_parts` qudits of dimension `d`.
///
/// Positivity is *not* part of the invariant: linear inversion of noisy
/// data routinely produces matrices with small negative eigenvalues, and
/// those need a home too. Use [`DensityMatrix::is_physical`] to check.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    d: usize,
    n_parts: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(d: usize, n_parts: usize, matrix: ComplexMatrix) -> Result<Self> {
        if d < 2 || n_parts == 0 {
            return Err(Error::invalid("d/n", "need d >= 2 and n >= 1"));
        }
        let dim = d.pow(n_parts as u32);
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state matrix is {}x{}, expected {dim}x{dim} for d = {d}, n = {n_parts}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > TOL_HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TOL_TRACE {
            return Err(Error::NotNormalized { trace });
        }
        Ok(DensityMatrix {
            d,
            n_parts,
            matrix: matrix.hermitian_part(),
        })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the ket is normalized here.
    pub fn from_ket(d: usize, n_parts: usize, ket: &[Complex64]) -> Result<Self> {
        let norm = vector_norm(ket);
        if norm == 0.0 {
            return Err(Error::invalid("ket", "zero vector"));
        }
        let unit: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
        Self::new(d, n_parts, ComplexMatrix::outer(&unit))
    }

    /// `I / d^n`.
    pub fn maximally_mixed(d: usize, n_parts: usize) -> Self {
        let dim = d.pow(n_parts as u32);
        DensityMatrix {
            d,
            n_parts,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_parts(&self) -> usize {
        self.n_parts
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigendecomposition(&self.matrix)?.min_value())
    }

    /// Minimum eigenvalue at least `-TOL_PSD`.
    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue().is_ok_and(|w| w >= -TOL_PSD)
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.inner(&self.matrix).re
    }

    /// Born-rule probability `Tr[ρ μ]`.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(op).re
    }
}

/// `Tr[ρ²]`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {0}x{0} and {1}x{1} states",
            rho.dim(),
            sigma.dim()
        )));
    }
    let eig = hermitian_eigendecomposition(rho.matrix())?;
    let min_rho = eig.min_value();
    if min_rho < -TOL_PSD {
        return Err(Error::NotPhysical { min_eigenvalue: min_rho });
    }
    let min_sigma = sigma.min_eigenvalue()?;
    if min_sigma < -TOL_PSD {
        return Err(Error::NotPhysical { min_eigenvalue: min_sigma });
    }
    let sqrt_rho = eig.reassemble_with(|w| w.max(0.0).sqrt());
    let inner = (&sqrt_rho * sigma.matrix()).matmul(&sqrt_rho).hermitian_part();
    let root_sum: f64 = hermitian_eigendecomposition(&inner)?
        .values
        .iter()
        .map(|w| w.max(0.0).sqrt())
        .sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Coefficients of a state in the tensor generator basis; see the module docs
/// for the scaling convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    d: usize,
    n_parts: usize,
    r: Vec<f64>,
}

impl BlochVector {
    pub fn new(d: usize, n_parts: usize, r: Vec<f64>) -> Result<Self> {
        let expected = (d * d).pow(n_parts as u32);
        if r.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "Bloch vector has {} coefficients, expected {expected}",
                r.len()
            )));
        }
        if (r[0] - 1.0).abs() > TOL_TRACE {
            return Err(Error::NotNormalized { trace: r[0] });
        }
        if let Some(pos) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("r[{pos}]"), "must be finite"));
        }
        Ok(BlochVector { d, n_parts, r })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_parts(&self) -> usize {
        self.n_parts
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.r
    }

    /// `Σ_{J≠0} r_J²`; bounded by `d(d-1)/2` for a single physical qudit.
    pub fn length_sqr(&self) -> f64 {
        self.r[1..].iter().map(|v| v * v).sum()
    }
}

/// Factor `(d/2)^m` between a Bloch coefficient and the raw expectation value.
pub fn bloch_scale(basis: &GeneratorBasis, flat: usize) -> f64 {
    (basis.d() as f64 / 2.0).powi(basis.non_identity_slots(flat) as i32)
}

/// `ρ = (1/d^n) Σ r_J Λ_J`.
pub fn from_bloch(b: &BlochVector) -> Result<DensityMatrix> {
    let basis = tensor_basis(b.d, b.n_parts)?;
    Ok(from_bloch_with(&basis, &b.r))
}

pub(crate) fn from_bloch_with(basis: &GeneratorBasis, r: &[f64]) -> DensityMatrix {
    let dim = basis.dim();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (op, &coef) in basis.operators().iter().zip(r) {
        if coef != 0.0 {
            m.add_scaled(Complex64::new(coef / dim as f64, 0.0), op);
        }
    }
    DensityMatrix {
        d: basis.d(),
        n_parts: basis.n_parts(),
        matrix: m.hermitian_part(),
    }
}

/// Inverse of [`from_bloch`].
pub fn to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    let trace = rho.matrix.trace().re;
    if (trace - 1.0).abs() > TOL_TRACE {
        return Err(Error::NotNormalized { trace });
    }
    let basis = tensor_basis(rho.d, rho.n_parts)?;
    let r = (0..basis.len())
        .map(|flat| bloch_scale(&basis, flat) * rho.expectation(basis.get(flat)))
        .collect();
    Ok(BlochVector {
        d: rho.d,
        n_parts: rho.n_parts,
        r,
    })
}

/// Primitive cube root of unity `e^{2πi/3}`.
pub fn alpha() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
}

/// Normalized single-qudit ket from the catalogue.
///
/// * `ket<k>` for any `d`: computational basis state `|k⟩`.
/// * qubits: `H = |0⟩`, `V = |1⟩`, `D = (|0⟩+|1⟩)/√2`, `L = (|0⟩+i|1⟩)/√2`.
/// * qutrits: `bal<a><b>` = `(|0⟩ + α^a|1⟩ + α^b|2⟩)/√3` with `a, b ∈ {0,1,2}`.
pub fn named_ket(name: &str, d: usize) -> Result<Vec<Complex64>> {
    let unknown = || Error::UnknownName(format!("{name} (d = {d})"));
    if let Some(k) = name.strip_prefix("ket") {
        let k: usize = k.parse().map_err(|_| unknown())?;
        if k >= d {
            return Err(unknown());
        }
        let mut ket = vec![ZERO; d];
        ket[k] = ONE;
        return Ok(ket);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match (name, d) {
        ("H", 2) => Ok(vec![ONE, ZERO]),
        ("V", 2) => Ok(vec![ZERO, ONE]),
        ("D", 2) => Ok(vec![ONE * s, ONE * s]),
        ("L", 2) => Ok(vec![ONE * s, I * s]),
        (_, 3) if name.starts_with("bal") && name.len() == 5 => {
            let digits: Vec<i32> = name[3..]
                .chars()
                .map(|ch| ch.to_digit(3).map(|v| v as i32))
                .collect::<Option<_>>()
                .ok_or_else(unknown)?;
            let a = alpha();
            let norm = 1.0 / 3f64.sqrt();
            Ok(vec![ONE * norm, a.powi(digits[0]) * norm, a.powi(digits[1]) * norm])
        }
        _ => Err(unknown()),
    }
}

/// Named state on `n` qudits.
///
/// Single-qudit names from [`named_ket`] give the product state with that
/// ket on every part. `mixed` is `I/d^n`; `max-entangled` is
/// `Σ_k |kk⟩/√d` and needs `n = 2`.
pub fn named_state(name: &str, d: usize, n: usize) -> Result<DensityMatrix> {
    if d < 2 || n == 0 {
        return Err(Error::invalid("d/n", "need d >= 2 and n >= 1"));
    }
    match name {
        "mixed" => Ok(DensityMatrix::maximally_mixed(d, n)),
        "max-entangled" => {
            if n != 2 {
                return Err(Error::UnknownName(format!("{name} requires n = 2")));
            }
            let mut ket = vec![ZERO; d * d];
            for k in 0..d {
                ket[k * d + k] = ONE;
            }
            DensityMatrix::from_ket(d, 2, &ket)
        }
        _ => {
            let single = ComplexMatrix::outer(&named_ket(name, d)?);
            let m = tensor_all(std::iter::repeat_n(&single, n));
            DensityMatrix::new(d, n, m)
        }
    }
}

/// Every name accepted by [`named_state`] for the given `d` and `n`.
pub fn catalogue(d: usize, n: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..d).map(|k| format!("ket{k}")).collect();
    if d == 2 {
        names.extend(["H", "V", "D", "L"].map(String::from));
    }
    if d == 3 {
        for a in 0..3 {
            for b in 0..3 {
                names.push(format!("bal{a}{b}"));
            }
        }
    }
    names.push("mixed".into());
    if n == 2 {
        names.push("max-entangled".into());
    }
    names
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PurityClass {
    Pure,
    Mixed,
}

impl std::str::FromStr for PurityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(PurityClass::Pure),
            "mixed" => Ok(PurityClass::Mixed),
            other => Err(Error::invalid("purity_class", format!("expected pure|mixed, got {other}"))),
        }
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random state from an explicit generator.
///
/// `Pure` normalizes a vector of i.i.d. complex normals; `Mixed` returns
/// `G G† / Tr[G G†]` for a square matrix `G` of i.i.d. complex normals.
pub fn random_state_with<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    n: usize,
    class: PurityClass,
) -> DensityMatrix {
    let dim = d.pow(n as u32);
    let matrix = match class {
        PurityClass::Pure => {
            let ket: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
            let norm = vector_norm(&ket);
            let unit: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
            ComplexMatrix::outer(&unit)
        }
        PurityClass::Mixed => {
            let data = (0..dim * dim).map(|_| complex_normal(rng)).collect();
            let g = ComplexMatrix::from_vec(dim, dim, data).expect("finite samples");
            let ggt = g.matmul(&g.adjoint());
            let tr = ggt.trace().re;
            ggt.scale_real(1.0 / tr)
        }
    };
    DensityMatrix {
        d,
        n_parts: n,
        matrix: matrix.hermitian_part(),
    }
}

/// Deterministic random state seeded through ChaCha8.
pub fn random_physical_state(d: usize, n: usize, seed: u64, class: PurityClass) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(&mut rng, d, n, class)
}
