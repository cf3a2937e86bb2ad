//! Elementary matrices and the ordered λ-operator basis of SU(d).
//!
//! Index conventions follow the usual physics notation and are 1-based in
//! every public constructor: `elementary(d, k, j)` has its unit entry at
//! row `k`, column `j`, stored at `(k - 1, j - 1)`.
//!
//! The single-qudit basis has `d²` operators. Slot 0 is the *unscaled*
//! identity `I_d` and slots `1..d²-1` are the traceless generators, placed by
//!
//! ```text
//! λ[(j-1)² + 2(k-1)] = Θ_j^k = e^k_j + e^j_k          1 ≤ k < j ≤ d
//! λ[(j-1)² + 2k - 1] = β_j^k = -i (e^k_j - e^j_k)
//! λ[j² - 1]          = η_{j-1}                       2 ≤ j ≤ d
//! ```
//!
//! so that `d = 2` gives `(I, X, Y, Z)` and `d = 3` gives the eight
//! Gell-Mann matrices in their standard order. Every generator satisfies
//! `Tr[λ_j λ_k] = 2 δ_jk`, while `Tr[λ_0²] = d`.

use crate::error::{Error, Result};
use crate::matrix::{tensor_all, ComplexMatrix, I, ONE};

/// Default cap on the operator dimension `d^n` for [`tensor_basis`]. The
/// basis holds `d^{2n}` dense operators of `d^{2n}` entries each.
pub const DEFAULT_TENSOR_DIM_CAP: usize = 32;

/// Unit matrix `e^k_j` with its single one at row `k`, column `j` (1-based).
pub fn elementary(d: usize, k: usize, j: usize) -> Result<ComplexMatrix> {
    check_index(d, k, "k")?;
    check_index(d, j, "j")?;
    let mut m = ComplexMatrix::zeros(d, d);
    m[(k - 1, j - 1)] = ONE;
    Ok(m)
}

fn check_index(d: usize, idx: usize, name: &str) -> Result<()> {
    if idx == 0 || idx > d {
        return Err(Error::IndexOutOfRange(format!(
            "{name} = {idx} not in 1..={d}"
        )));
    }
    Ok(())
}

fn check_pair(d: usize, k: usize, j: usize) -> Result<()> {
    check_index(d, k, "k")?;
    check_index(d, j, "j")?;
    if k >= j {
        return Err(Error::InvalidPair { k, j });
    }
    Ok(())
}

/// Symmetric off-diagonal generator `Θ_j^k = e^k_j + e^j_k`, `k < j`.
pub fn theta(d: usize, k: usize, j: usize) -> Result<ComplexMatrix> {
    check_pair(d, k, j)?;
    let mut m = elementary(d, k, j)?;
    m[(j - 1, k - 1)] = ONE;
    Ok(m)
}

/// Antisymmetric off-diagonal generator `β_j^k = -i (e^k_j - e^j_k)`, `k < j`.
pub fn beta(d: usize, k: usize, j: usize) -> Result<ComplexMatrix> {
    check_pair(d, k, j)?;
    let mut m = ComplexMatrix::zeros(d, d);
    m[(k - 1, j - 1)] = -I;
    m[(j - 1, k - 1)] = I;
    Ok(m)
}

/// Diagonal generator `η_r = √(2 / r(r+1)) · diag(1, …, 1, -r, 0, …)` with
/// `r` leading ones, `1 ≤ r ≤ d - 1`.
pub fn eta(d: usize, r: usize) -> Result<ComplexMatrix> {
    if r == 0 || r >= d {
        return Err(Error::IndexOutOfRange(format!(
            "r = {r} not in 1..={}",
            d.saturating_sub(1)
        )));
    }
    let norm = 1.0 / ((r * (r + 1) / 2) as f64).sqrt();
    let mut diag = vec![0.0; d];
    for v in diag.iter_mut().take(r) {
        *v = norm;
    }
    diag[r] = -(r as f64) * norm;
    Ok(ComplexMatrix::from_real_diagonal(&diag))
}

/// Which family a generator slot belongs to, with its 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Identity,
    Theta { k: usize, j: usize },
    Beta { k: usize, j: usize },
    Eta { r: usize },
}

/// Slot assignment for every generator of SU(d), identity included.
/// Entry `i` describes `λ_i`.
pub fn slot_map(d: usize) -> Vec<GeneratorKind> {
    let mut slots = vec![None; d * d];
    slots[0] = Some(GeneratorKind::Identity);
    for j in 2..=d {
        for k in 1..j {
            slots[(j - 1) * (j - 1) + 2 * (k - 1)] = Some(GeneratorKind::Theta { k, j });
            slots[(j - 1) * (j - 1) + 2 * k - 1] = Some(GeneratorKind::Beta { k, j });
        }
        slots[j * j - 1] = Some(GeneratorKind::Eta { r: j - 1 });
    }
    slots
        .into_iter()
        .map(|s| s.expect("index map leaves no slot empty"))
        .collect()
}

/// Ordered operator basis `{λ_0, …, λ_{d²-1}}` of one qudit, or its n-fold
/// tensor-product extension.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    d: usize,
    n_parts: usize,
    operators: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    /// Local dimension of each part.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_parts(&self) -> usize {
        self.n_parts
    }

    /// Dimension of the operators, `d^n`.
    pub fn dim(&self) -> usize {
        self.d.pow(self.n_parts as u32)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn get(&self, index: usize) -> &ComplexMatrix {
        &self.operators[index]
    }

    pub fn into_operators(self) -> Vec<ComplexMatrix> {
        self.operators
    }

    /// Digits `(j1, …, jn)` of a flat tensor index, most significant first.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        multi_index(self.d, self.n_parts, flat)
    }

    /// Number of non-identity slots in the tensor factor at `flat`.
    pub fn non_identity_slots(&self, flat: usize) -> usize {
        self.multi_index(flat).iter().filter(|&&j| j != 0).count()
    }

    /// `Tr[Λ_J²] = d^{n-m} · 2^m` for a tensor operator with `m` non-identity slots.
    pub fn norm_sqr(&self, flat: usize) -> f64 {
        let m = self.non_identity_slots(flat) as i32;
        (self.d as f64).powi(self.n_parts as i32 - m) * 2f64.powi(m)
    }
}

pub(crate) fn multi_index(d: usize, n: usize, mut flat: usize) -> Vec<usize> {
    let base = d * d;
    let mut digits = vec![0; n];
    for slot in digits.iter_mut().rev() {
        *slot = flat % base;
        flat /= base;
    }
    digits
}

fn generator(d: usize, kind: GeneratorKind) -> ComplexMatrix {
    match kind {
        GeneratorKind::Identity => ComplexMatrix::identity(d),
        GeneratorKind::Theta { k, j } => theta(d, k, j).expect("valid pair"),
        GeneratorKind::Beta { k, j } => beta(d, k, j).expect("valid pair"),
        GeneratorKind::Eta { r } => eta(d, r).expect("valid r"),
    }
}

/// `{λ_0 = I_d, λ_1, …, λ_{d²-1}}` for one qudit.
pub fn lambda_basis(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(Error::invalid("d", "qudit dimension must be at least 2"));
    }
    let operators = slot_map(d).into_iter().map(|k| generator(d, k)).collect();
    Ok(GeneratorBasis {
        d,
        n_parts: 1,
        operators,
    })
}

/// All `d^{2n}` products `λ_{j1} ⊗ … ⊗ λ_{jn}` in lexicographic order of
/// `(j1, …, jn)`, with the default dimension cap.
pub fn tensor_basis(d: usize, n: usize) -> Result<GeneratorBasis> {
    tensor_basis_with_cap(d, n, DEFAULT_TENSOR_DIM_CAP)
}

pub fn tensor_basis_with_cap(d: usize, n: usize, dim_cap: usize) -> Result<GeneratorBasis> {
    if n == 0 {
        return Err(Error::invalid("n", "number of parts must be at least 1"));
    }
    let dim = d
        .checked_pow(n as u32)
        .ok_or(Error::DimensionTooLarge { dim: usize::MAX, cap: dim_cap })?;
    if dim > dim_cap {
        return Err(Error::DimensionTooLarge { dim, cap: dim_cap });
    }
    let single = lambda_basis(d)?;
    if n == 1 {
        return Ok(single);
    }
    let count = (d * d).pow(n as u32);
    let operators = (0..count)
        .map(|flat| tensor_all(multi_index(d, n, flat).iter().map(|&j| single.get(j))))
        .collect();
    Ok(GeneratorBasis {
        d,
        n_parts: n,
        operators,
    })
}

/// Gram matrix `G[a, b] = Tr[A_a† A_b]` of a list of operators.
pub fn gram_matrix(ops: &[ComplexMatrix]) -> ComplexMatrix {
    let n = ops.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = ops[a].inner(&ops[b]);
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    g
}
