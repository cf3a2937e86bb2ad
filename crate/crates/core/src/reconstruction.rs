//! State reconstruction from counts.
//!
//! Linear inversion solves `A t = n` for `t_j = 𝒩 Tr[ρ Λ_j]`. The identity
//! slot gives `t_0 = 𝒩 Tr ρ = 𝒩`, which calibrates the unknown count scale;
//! the remaining `t_j / t_0` are expectation values, rescaled to Bloch
//! coefficients (see [`crate::states`]) and assembled into `ρ`. Noise can
//! leave that matrix with negative eigenvalues, so a physical estimate is
//! always produced alongside it, by eigenvalue projection or by iterative
//! maximum likelihood.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorBasis;
use crate::matrix::{hermitian_eigendecomposition, inverse, ComplexMatrix, HermitianEigen};
use crate::measurement::{
    a_matrix_rows, CountRecord, MeasurementKind, MeasurementSet, Scale, KAPPA_MAX,
};
use crate::states::{bloch_scale, from_bloch_with, DensityMatrix, TOL_PSD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Projected,
    Mle,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Method::Linear),
            "projected" => Ok(Method::Projected),
            "mle" => Ok(Method::Mle),
            other => Err(Error::invalid("method", format!("expected linear|projected|mle, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub condition_number: f64,
    pub min_eigenvalue_linear: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_likelihood: Option<f64>,
    /// Log-likelihood after every accepted MLE step.
    #[serde(skip)]
    pub log_likelihood_trace: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Direct linear-inversion estimate; Hermitian and unit trace, possibly
    /// with negative eigenvalues.
    pub rho_linear: DensityMatrix,
    /// Positive semidefinite estimate produced by `method`.
    pub rho_physical: DensityMatrix,
    pub method: Method,
    pub scale_estimate: f64,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    /// The estimate `method` asks for: `rho_linear` for [`Method::Linear`],
    /// otherwise `rho_physical`.
    pub fn reported(&self) -> &DensityMatrix {
        match self.method {
            Method::Linear => &self.rho_linear,
            Method::Projected | Method::Mle => &self.rho_physical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub max_iter: usize,
    /// Stop once an accepted step improves the log-likelihood `L` by less
    /// than `tol · (L_sat − L)`, where `L_sat` is the saturated model
    /// `𝒩p_i = n_i`. Reaching `max_iter` is an error only when the last gain
    /// also exceeds `tol · |L|`.
    pub tol: f64,
    /// Floor on predicted probabilities inside logarithms and ratios.
    pub p_min: f64,
    /// Initial dilution `ε ∈ (0, 1]`.
    pub dilution: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            max_iter: 5000,
            tol: 1e-10,
            p_min: 1e-12,
            dilution: 1.0,
        }
    }
}

/// Linear map from counts to generator coefficients for one measurement set,
/// prepared once and reused across datasets.
#[derive(Debug, Clone)]
pub struct Reconstructor<'a> {
    ms: &'a MeasurementSet,
    basis: &'a GeneratorBasis,
    a_inv: ComplexMatrix,
    condition: f64,
    warnings: Vec<String>,
}

impl<'a> Reconstructor<'a> {
    pub fn new(ms: &'a MeasurementSet, basis: &'a GeneratorBasis) -> Result<Self> {
        let a = match ms.a_matrix() {
            Some(a) if a.cols() == basis.len() => a.clone(),
            _ => a_matrix_rows(ms, basis)?,
        };
        let required = ms.required_len();
        let mut warnings = Vec::new();
        if ms.len() < required {
            return Err(Error::IncompleteSet { condition: f64::INFINITY });
        }
        if ms.len() > required {
            warnings.push(format!(
                "overcomplete set ({} operators for {required} unknowns); using least squares",
                ms.len()
            ));
        }
        let (a_inv, condition) = inverse(&a).map_err(|e| match e {
            Error::Singular { condition } => Error::IncompleteSet { condition },
            other => other,
        })?;
        if condition >= KAPPA_MAX {
            return Err(Error::IncompleteSet { condition });
        }
        Ok(Reconstructor {
            ms,
            basis,
            a_inv,
            condition,
            warnings,
        })
    }

    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    pub fn measurement_set(&self) -> &MeasurementSet {
        self.ms
    }

    fn check_counts(&self, counts: &CountRecord) -> Result<()> {
        if counts.counts.len() != self.ms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} counts for {} measurement operators",
                counts.counts.len(),
                self.ms.len()
            )));
        }
        counts.validate(self.ms.kind() == MeasurementKind::Observable)
    }

    /// `t = A⁻¹ n`, i.e. `𝒩 · Tr[ρ Λ_j]` for every basis slot.
    fn scaled_expectations(&self, counts: &[f64]) -> Vec<f64> {
        let n: Vec<Complex64> = counts.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        self.a_inv.matvec(&n).iter().map(|z| z.re).collect()
    }

    fn assemble(&self, t: &[f64]) -> Result<(f64, DensityMatrix)> {
        let scale = t[0];
        if !(scale > 0.0) {
            return Err(Error::NegativeScale(scale));
        }
        let r: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(j, tj)| if j == 0 { 1.0 } else { bloch_scale(self.basis, j) * tj / scale })
            .collect();
        Ok((scale, from_bloch_with(self.basis, &r)))
    }

    /// Linear inversion followed by projection onto the physical states.
    pub fn linear(&self, counts: &CountRecord) -> Result<ReconstructionResult> {
        self.check_counts(counts)?;
        let t = self.scaled_expectations(&counts.counts);
        let (scale, rho_linear) = self.assemble(&t)?;
        let eig = hermitian_eigendecomposition(rho_linear.matrix())?;
        let rho_physical = project_physical(&rho_linear)?;
        Ok(ReconstructionResult {
            rho_linear,
            rho_physical,
            method: Method::Projected,
            scale_estimate: scale,
            diagnostics: Diagnostics {
                condition_number: self.condition,
                min_eigenvalue_linear: eig.min_value(),
                warnings: self.warnings.clone(),
                ..Diagnostics::default()
            },
        })
    }

    /// Maximum-likelihood estimate; the linear estimate is kept for
    /// diagnostics.
    pub fn mle(&self, counts: &CountRecord, opts: &MleOptions) -> Result<ReconstructionResult> {
        let mut result = self.linear(counts)?;
        // A physical linear estimate from a square complete set reproduces
        // the observed frequencies, so it is already the maximum.
        let square = self.ms.len() == self.ms.required_len();
        let start = (square && result.diagnostics.min_eigenvalue_linear >= -TOL_PSD)
            .then(|| clip_to_psd(result.rho_linear.matrix().clone()));
        let fit = mle_fit(counts, self.ms, opts, start.as_ref())?;
        result.rho_physical = fit.rho;
        result.method = Method::Mle;
        result.scale_estimate = fit.scale;
        result.diagnostics.mle_iterations = Some(fit.iterations);
        result.diagnostics.log_likelihood = Some(fit.log_likelihood);
        result.diagnostics.log_likelihood_trace = fit.trace;
        result.diagnostics.warnings.extend(fit.warnings);
        Ok(result)
    }

    /// Reconstruction with the requested method.
    pub fn reconstruct(&self, counts: &CountRecord, method: Method) -> Result<ReconstructionResult> {
        match method {
            Method::Linear => {
                let mut r = self.linear(counts)?;
                r.method = Method::Linear;
                Ok(r)
            }
            Method::Projected => self.linear(counts),
            Method::Mle => self.mle(counts, &MleOptions::default()),
        }
    }

    /// Linearized covariance of the Bloch coefficients.
    ///
    /// Counts are taken as independent with variance `n_i` (or the record's
    /// own `variances`), propagated through `A⁻¹` and through the
    /// normalization `r_j = (d/2)^m t_j / t_0`.
    pub fn covariance(&self, counts: &CountRecord) -> Result<Covariance> {
        self.check_counts(counts)?;
        if self.ms.kind() != MeasurementKind::Projective {
            return Err(Error::invalid("basis", "count covariance needs a projective set"));
        }
        let var = counts.variances.as_deref().unwrap_or(&counts.counts);
        if var.len() != counts.counts.len() {
            return Err(Error::invalid("variances", "length differs from counts"));
        }
        let t = self.scaled_expectations(&counts.counts);
        let scale = t[0];
        if !(scale > 0.0) {
            return Err(Error::NegativeScale(scale));
        }
        let p = self.basis.len();
        let m = counts.counts.len();
        // Cov[t] = A⁻¹ diag(v) A⁻†
        let mut cov_t = vec![0.0; p * p];
        for a in 0..p {
            for b in a..p {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    acc += self.a_inv[(a, i)] * var[i] * self.a_inv[(b, i)].conj();
                }
                cov_t[a * p + b] = acc.re;
                cov_t[b * p + a] = acc.re;
            }
        }
        // r_j = s_j t_j / t_0:  ∂r_j/∂t_k = s_j (δ_jk - e_j δ_0k) / t_0
        let s: Vec<f64> = (0..p).map(|j| bloch_scale(self.basis, j)).collect();
        let e: Vec<f64> = t.iter().map(|tj| tj / scale).collect();
        let jac = |j: usize, k: usize| -> f64 {
            if j == 0 {
                return 0.0;
            }
            let mut v = if j == k { 1.0 } else { 0.0 };
            if k == 0 {
                v -= e[j];
            }
            s[j] * v / scale
        };
        let mut values = vec![0.0; p * p];
        for a in 1..p {
            for b in a..p {
                let mut acc = 0.0;
                for k in [0, a] {
                    for l in [0, b] {
                        acc += jac(a, k) * cov_t[k * p + l] * jac(b, l);
                    }
                }
                values[a * p + b] = acc;
                values[b * p + a] = acc;
            }
        }
        Ok(Covariance { size: p, values })
    }
}

/// Symmetric covariance matrix over the Bloch coefficients; slot 0 is fixed
/// and has zero variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    size: usize,
    values: Vec<f64>,
}

impl Covariance {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn variances(&self) -> Vec<f64> {
        (0..self.size).map(|i| self.get(i, i)).collect()
    }
}

/// Linear inversion of `counts` through `ms`; see [`Reconstructor::linear`].
pub fn linear_inversion(
    counts: &CountRecord,
    ms: &MeasurementSet,
    basis: &GeneratorBasis,
) -> Result<ReconstructionResult> {
    let mut r = Reconstructor::new(ms, basis)?.linear(counts)?;
    r.method = Method::Linear;
    Ok(r)
}

pub fn mle_reconstruct(
    counts: &CountRecord,
    ms: &MeasurementSet,
    basis: &GeneratorBasis,
    opts: &MleOptions,
) -> Result<ReconstructionResult> {
    Reconstructor::new(ms, basis)?.mle(counts, opts)
}

pub fn error_covariance(
    counts: &CountRecord,
    ms: &MeasurementSet,
    basis: &GeneratorBasis,
) -> Result<Covariance> {
    Reconstructor::new(ms, basis)?.covariance(counts)
}

/// Frobenius-closest unit-trace positive semidefinite matrix.
///
/// The eigenvalues are projected onto the probability simplex: a common
/// shift `t` is subtracted and the result clipped at zero, with `t` chosen so
/// the survivors sum to one. Eigenvectors are kept.
pub fn project_physical(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let eig = hermitian_eigendecomposition(rho.matrix())?;
    let projected = project_simplex(&eig.values);
    let mut out = HermitianEigen {
        values: projected,
        vectors: eig.vectors,
    }
    .reassemble();
    // Absorb the last round-off in the trace.
    let tr = out.trace().re;
    out = out.scale_real(1.0 / tr);
    DensityMatrix::new(rho.d(), rho.n_parts(), out)
}

/// Euclidean projection of a descending-sorted vector onto `{x ≥ 0, Σx = 1}`.
fn project_simplex(sorted_desc: &[f64]) -> Vec<f64> {
    let mut cumsum = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted_desc.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            shift = t;
        }
    }
    sorted_desc.iter().map(|u| (u - shift).max(0.0)).collect()
}

struct MleFit {
    rho: DensityMatrix,
    scale: f64,
    iterations: usize,
    log_likelihood: f64,
    trace: Vec<f64>,
    warnings: Vec<String>,
}

/// Diluted `RρR` iteration on the Poisson likelihood
/// `L = Σ_i n_i ln(𝒩 p_i) - 𝒩 Σ_i p_i`.
///
/// Every step is `σ ← N[(1 - ε) σ + ε R σ R]`; a step that lowers `L` is
/// rejected and `ε` halved. The operator `R` depends on what is known about
/// `𝒩`:
///
/// * unknown: `𝒩` is profiled out (`𝒩̂ = Σn / Σp`). The operators are
///   whitened by `G = Σ μ_i`, so that `ν_i = G^{-1/2} μ_i G^{-1/2}` sum to the
///   identity and `σ ∝ G^{1/2} ρ G^{1/2}`; then `R = Σ (f_i / q_i) ν_i` with
///   frequencies `f_i = n_i / Σn` and `q_i = Tr[σ ν_i]`.
/// * known: `σ = ρ` and `R = I + Σ (f_i / p_i) μ_i - (𝒩 / Σn) G`, which
///   reduces to `Σ (n_i / 𝒩p_i) μ_i` when the `μ_i` sum to the identity and
///   `Σn = 𝒩`. Its fixed points are the stationary points of `L` on the
///   unit-trace states.
///
/// `start` is an optional initial density matrix; the default is `I/d^n`.
fn mle_fit(
    counts: &CountRecord,
    ms: &MeasurementSet,
    opts: &MleOptions,
    start: Option<&ComplexMatrix>,
) -> Result<MleFit> {
    if ms.kind() != MeasurementKind::Projective {
        return Err(Error::invalid("method", "maximum likelihood needs a projective measurement set"));
    }
    counts.validate(false)?;
    if !(opts.dilution > 0.0 && opts.dilution <= 1.0) {
        return Err(Error::invalid("dilution", "must lie in (0, 1]"));
    }
    let total = counts.total();
    if !(total > 0.0) {
        return Err(Error::invalid("counts", "all counts are zero"));
    }
    let dim = ms.dim();
    let g = ms.operator_sum();
    let g_eig = hermitian_eigendecomposition(&g)?;
    if g_eig.min_value() <= 1e-12 * g_eig.values[0] {
        return Err(Error::IncompleteSet { condition: f64::INFINITY });
    }
    let known = match counts.scale {
        Scale::Known(v) if v > 0.0 => Some(v),
        Scale::Known(v) => return Err(Error::NegativeScale(v)),
        Scale::Unknown => None,
    };
    let freqs: Vec<f64> = counts.counts.iter().map(|n| n / total).collect();
    let mixed = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);

    // Working frame: operators, start state, and the map back to ρ.
    let (ops, g_inv_half) = match known {
        None => {
            let g_inv_half = g_eig.reassemble_with(|w| 1.0 / w.sqrt());
            let whitened = ms
                .operators()
                .iter()
                .map(|mu| g_inv_half.matmul(mu).matmul(&g_inv_half).hermitian_part())
                .collect::<Vec<_>>();
            (whitened, Some(g_inv_half))
        }
        Some(_) => (ms.operators().to_vec(), None),
    };
    let mut sigma = match (start, known) {
        (Some(rho), None) => {
            let g_half = g_eig.reassemble_with(f64::sqrt);
            let s0 = g_half.matmul(rho).matmul(&g_half);
            let tr = s0.trace().re;
            s0.scale_real(1.0 / tr).hermitian_part()
        }
        (Some(rho), Some(_)) => rho.clone(),
        (None, _) => mixed,
    };

    let probs = |sigma: &ComplexMatrix| -> Vec<f64> {
        ops.iter().map(|op| sigma.trace_product(op).re.max(opts.p_min)).collect()
    };
    // L is tracked as its (non-positive) offset from the saturated model
    // 𝒩p_i = n_i to avoid cancellation.
    let saturated: f64 = counts
        .counts
        .iter()
        .filter(|n| **n > 0.0)
        .map(|n| n * n.ln())
        .sum::<f64>()
        - total;
    let deficit = |q: &[f64]| -> f64 {
        let (scale, penalty) = match known {
            // Profiled: 𝒩̂ Σq = Σn exactly.
            None => (total / q.iter().sum::<f64>(), 0.0),
            Some(n) => (n, n * q.iter().sum::<f64>() - total),
        };
        counts
            .counts
            .iter()
            .zip(q)
            .filter(|(n, _)| **n > 0.0)
            .map(|(n, qi)| n * (scale * qi / n).ln())
            .sum::<f64>()
            - penalty
    };
    let r_operator = |q: &[f64]| -> ComplexMatrix {
        let mut r = match known {
            None => ComplexMatrix::zeros(dim, dim),
            Some(n) => {
                let mut r = ComplexMatrix::identity(dim);
                r.add_scaled(Complex64::new(-n / total, 0.0), &g);
                r
            }
        };
        for ((op, f), qi) in ops.iter().zip(&freqs).zip(q) {
            if *f > 0.0 {
                r.add_scaled(Complex64::new(f / qi, 0.0), op);
            }
        }
        r
    };

    let mut q = probs(&sigma);
    let mut ll = deficit(&q);
    let mut trace = vec![saturated + ll];
    let mut eps = opts.dilution;
    let mut converged = false;
    let mut last_gain = f64::INFINITY;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let r = r_operator(&q);
        let rsr = r.matmul(&sigma).matmul(&r);
        let mut candidate = sigma.scale_real(1.0 - eps);
        candidate.add_scaled(Complex64::new(eps, 0.0), &rsr);
        let tr = candidate.trace().re;
        let candidate = candidate.scale_real(1.0 / tr).hermitian_part();
        let q_new = probs(&candidate);
        let ll_new = deficit(&q_new);
        if ll_new >= ll {
            let gain = ll_new - ll;
            sigma = candidate;
            q = q_new;
            ll = ll_new;
            trace.push(saturated + ll);
            eps = (eps * 2.0).min(opts.dilution);
            last_gain = gain;
            // `ll` is the distance below the saturated model.
            let stop = gain <= opts.tol * ll.abs();
            if stop {
                converged = true;
                break;
            }
        } else {
            eps *= 0.5;
            if eps < 1e-12 {
                // No ascent direction left at machine precision.
                converged = true;
                break;
            }
        }
    }
    let mut warnings = Vec::new();
    if !converged {
        if last_gain > opts.tol * (saturated + ll).abs() {
            return Err(Error::NonConvergence { iterations });
        }
        warnings.push(format!(
            "MLE stopped at max_iter = {iterations}; last gain {last_gain:.3e} is below tol·|L| but not below tol·(L_sat − L)"
        ));
    }

    let rho = match &g_inv_half {
        Some(w) => {
            let rho = w.matmul(&sigma).matmul(w).hermitian_part();
            let tr = rho.trace().re;
            rho.scale_real(1.0 / tr)
        }
        None => sigma,
    };
    let rho = clip_to_psd(rho);
    let scale = match known {
        Some(n) => n,
        None => {
            let sum_p: f64 = ms.operators().iter().map(|mu| rho.trace_product(mu).re).sum();
            total / sum_p
        }
    };
    Ok(MleFit {
        rho: DensityMatrix::new(ms.d(), ms.n_parts(), rho)?,
        scale,
        iterations,
        log_likelihood: saturated + ll,
        trace,
        warnings,
    })
}

/// Zeroes eigenvalues that round-off pushed below zero and renormalizes.
fn clip_to_psd(m: ComplexMatrix) -> ComplexMatrix {
    match hermitian_eigendecomposition(&m) {
        Ok(eig) if eig.min_value() < 0.0 => {
            let out = eig.reassemble_with(|w| w.max(0.0));
            let tr = out.trace().re;
            out.scale_real(1.0 / tr)
        }
        _ => m,
    }
}
