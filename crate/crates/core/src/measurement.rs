//! Measurement sets, the A-matrix, Born-rule counts and Poissonian noise.
//!
//! A [`MeasurementSet`] is an ordered list of operators `μ_i`, usually rank-one
//! projectors `|ψ_i⟩⟨ψ_i|`. Its A-matrix expresses each operator in the
//! generator basis, `μ_i = Σ_j A_ij Λ_j`, with
//!
//! ```text
//! A_ij = Tr[μ_i Λ_j] / Tr[Λ_j²]
//! ```
//!
//! A complete set has exactly `d^{2n}` operators (the identity slot is one
//! of the unknowns) and an invertible A.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::generators::{lambda_basis, GeneratorBasis};
use crate::matrix::{
    condition_number, hermitian_eigendecomposition, tensor_all, vector_norm, ComplexMatrix, I,
    ONE, TOL_HERMITIAN, ZERO,
};
use crate::states::{alpha, named_ket, DensityMatrix};

/// Largest A-matrix condition number accepted as complete.
pub const KAPPA_MAX: f64 = 1e8;
/// Tolerance on trace, rank and positivity when validating projectors.
pub const TOL_PROJECTOR: f64 = 1e-9;
/// Below this mean the Poisson sampler uses exact inversion; above it, a
/// rounded normal approximation.
pub const POISSON_INVERSION_LIMIT: f64 = 30.0;

/// Whether the operators are rank-one projectors (counts are Poissonian) or
/// general Hermitian observables whose expectation values are taken as
/// directly measurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    Projective,
    Observable,
}

#[derive(Debug, Clone)]
pub struct MeasurementSet {
    d: usize,
    n_parts: usize,
    kind: MeasurementKind,
    operators: Vec<ComplexMatrix>,
    labels: Vec<String>,
    kets: Option<Vec<Vec<Complex64>>>,
    a_matrix: Option<ComplexMatrix>,
}

fn check_shape(d: usize, n_parts: usize) -> Result<usize> {
    if d < 2 || n_parts == 0 {
        return Err(Error::invalid("d/n", "need d >= 2 and n >= 1"));
    }
    Ok(d.pow(n_parts as u32))
}

impl MeasurementSet {
    /// Projectors onto the given kets, normalized here.
    pub fn from_kets(d: usize, n_parts: usize, labeled: Vec<(String, Vec<Complex64>)>) -> Result<Self> {
        let dim = check_shape(d, n_parts)?;
        let mut labels = Vec::with_capacity(labeled.len());
        let mut kets = Vec::with_capacity(labeled.len());
        let mut operators = Vec::with_capacity(labeled.len());
        for (idx, (label, ket)) in labeled.into_iter().enumerate() {
            if ket.len() != dim {
                return Err(Error::invalid(
                    format!("elements[{idx}].ket"),
                    format!("length {} but state dimension is {dim}", ket.len()),
                ));
            }
            let norm = vector_norm(&ket);
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::invalid(format!("elements[{idx}].ket"), "zero or non-finite ket"));
            }
            let unit: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
            operators.push(ComplexMatrix::outer(&unit));
            kets.push(unit);
            labels.push(label);
        }
        Ok(MeasurementSet {
            d,
            n_parts,
            kind: MeasurementKind::Projective,
            operators,
            labels,
            kets: Some(kets),
            a_matrix: None,
        })
    }

    /// Explicit projector matrices; each must be Hermitian, PSD, trace one
    /// and rank one.
    pub fn from_projectors(
        d: usize,
        n_parts: usize,
        labeled: Vec<(String, ComplexMatrix)>,
    ) -> Result<Self> {
        let dim = check_shape(d, n_parts)?;
        let mut labels = Vec::with_capacity(labeled.len());
        let mut operators = Vec::with_capacity(labeled.len());
        for (idx, (label, m)) in labeled.into_iter().enumerate() {
            let field = format!("elements[{idx}].projector");
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::invalid(field, format!("expected a {dim}x{dim} matrix")));
            }
            if !m.is_hermitian(TOL_HERMITIAN) {
                return Err(Error::invalid(field, "not Hermitian"));
            }
            let eig = hermitian_eigendecomposition(&m)?;
            let rank_one = (eig.values[0] - 1.0).abs() <= TOL_PROJECTOR
                && eig.values[1..].iter().all(|w| w.abs() <= TOL_PROJECTOR);
            if !rank_one {
                return Err(Error::invalid(field, "not a rank-one trace-one projector"));
            }
            operators.push(m.hermitian_part());
            labels.push(label);
        }
        Ok(MeasurementSet {
            d,
            n_parts,
            kind: MeasurementKind::Projective,
            operators,
            labels,
            kets: None,
            a_matrix: None,
        })
    }

    /// Hermitian observables measured through their expectation values.
    pub fn from_observables(
        d: usize,
        n_parts: usize,
        labeled: Vec<(String, ComplexMatrix)>,
    ) -> Result<Self> {
        let dim = check_shape(d, n_parts)?;
        for (idx, (_, m)) in labeled.iter().enumerate() {
            let field = format!("elements[{idx}].operator");
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::invalid(field, format!("expected a {dim}x{dim} matrix")));
            }
            if !m.is_hermitian(TOL_HERMITIAN) {
                return Err(Error::invalid(field, "not Hermitian"));
            }
        }
        let (labels, operators) = labeled.into_iter().unzip();
        Ok(MeasurementSet {
            d,
            n_parts,
            kind: MeasurementKind::Observable,
            operators,
            labels,
            kets: None,
            a_matrix: None,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_parts(&self) -> usize {
        self.n_parts
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n_parts as u32)
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
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

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Normalized kets, when the set was built from kets.
    pub fn kets(&self) -> Option<&[Vec<Complex64>]> {
        self.kets.as_deref()
    }

    /// Number of operators a square A-matrix needs, `d^{2n}`.
    pub fn required_len(&self) -> usize {
        (self.d * self.d).pow(self.n_parts as u32)
    }

    pub fn a_matrix(&self) -> Option<&ComplexMatrix> {
        self.a_matrix.as_ref()
    }

    /// Computes and stores the A-matrix.
    pub fn with_a_matrix(mut self, basis: &GeneratorBasis) -> Result<Self> {
        self.a_matrix = Some(build_a_matrix(&self, basis)?);
        Ok(self)
    }

    /// A-matrix present and its condition number below [`KAPPA_MAX`].
    pub fn is_complete(&self) -> bool {
        self.a_matrix
            .as_ref()
            .is_some_and(|a| condition_number(a) < KAPPA_MAX)
    }

    /// Sum of all operators, `Σ_i μ_i`.
    pub fn operator_sum(&self) -> ComplexMatrix {
        let dim = self.dim();
        let mut g = ComplexMatrix::zeros(dim, dim);
        for op in &self.operators {
            g.add_scaled(ONE, op);
        }
        g
    }

    /// Tensor products `μ_{i1} ⊗ … ⊗ μ_{in}` of single-part sets, in
    /// lexicographic order of `(i1, …, in)`.
    pub fn product(parts: &[MeasurementSet]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("product", "needs at least one factor"))?;
        if let Some(bad) = parts.iter().find(|p| p.d != first.d || p.n_parts != 1 || p.kind != first.kind) {
            return Err(Error::BasisMismatch(format!(
                "product factors must be single-part sets of one kind and the same d (got d = {}, n = {})",
                bad.d, bad.n_parts
            )));
        }
        let sizes: Vec<usize> = parts.iter().map(MeasurementSet::len).collect();
        let total: usize = sizes.iter().product();
        let mut operators = Vec::with_capacity(total);
        let mut labels = Vec::with_capacity(total);
        let mut kets = parts.iter().all(|p| p.kets.is_some()).then(|| Vec::with_capacity(total));
        for flat in 0..total {
            let mut rem = flat;
            let mut idx = vec![0; parts.len()];
            for (slot, &size) in idx.iter_mut().zip(&sizes).rev() {
                *slot = rem % size;
                rem /= size;
            }
            operators.push(tensor_all(idx.iter().zip(parts).map(|(&i, p)| &p.operators[i])));
            labels.push(
                idx.iter()
                    .zip(parts)
                    .map(|(&i, p)| p.labels[i].as_str())
                    .collect::<Vec<_>>()
                    .join("⊗"),
            );
            if let Some(kets) = kets.as_mut() {
                let mut ket = vec![ONE];
                for (&i, p) in idx.iter().zip(parts) {
                    let factor = &p.kets.as_ref().expect("checked above")[i];
                    ket = ket
                        .iter()
                        .flat_map(|a| factor.iter().map(move |b| a * b))
                        .collect();
                }
                kets.push(ket);
            }
        }
        Ok(MeasurementSet {
            d: first.d,
            n_parts: parts.len(),
            kind: first.kind,
            operators,
            labels,
            kets,
            a_matrix: None,
        })
    }
}

/// Rows `A_ij = Tr[μ_i Λ_j] / Tr[Λ_j²]` for every operator in the set,
/// whatever its length.
pub fn a_matrix_rows(ms: &MeasurementSet, basis: &GeneratorBasis) -> Result<ComplexMatrix> {
    if basis.d() != ms.d || basis.n_parts() != ms.n_parts {
        return Err(Error::BasisMismatch(format!(
            "measurement set is (d = {}, n = {}), basis is (d = {}, n = {})",
            ms.d,
            ms.n_parts,
            basis.d(),
            basis.n_parts()
        )));
    }
    let cols = basis.len();
    let norms: Vec<f64> = (0..cols).map(|j| basis.norm_sqr(j)).collect();
    let mut a = ComplexMatrix::zeros(ms.len(), cols);
    for (i, mu) in ms.operators.iter().enumerate() {
        for (j, lam) in basis.operators().iter().enumerate() {
            a[(i, j)] = mu.trace_product(lam) / norms[j];
        }
    }
    Ok(a)
}

/// Square A-matrix of a set with exactly `d^{2n}` operators.
pub fn build_a_matrix(ms: &MeasurementSet, basis: &GeneratorBasis) -> Result<ComplexMatrix> {
    if ms.len() != ms.required_len() {
        return Err(Error::WrongCount {
            found: ms.len(),
            expected: ms.required_len(),
        });
    }
    a_matrix_rows(ms, basis)
}

/// How the count scale `𝒩` is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Known(f64),
    Unknown,
}

impl Scale {
    pub fn value(self) -> Option<f64> {
        match self {
            Scale::Known(v) => Some(v),
            Scale::Unknown => None,
        }
    }
}

impl Serialize for Scale {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scale::Known(v) => s.serialize_f64(*v),
            Scale::Unknown => s.serialize_str("unknown"),
        }
    }
}

impl<'de> Deserialize<'de> for Scale {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Number(v) if v.is_finite() && v > 0.0 => Ok(Scale::Known(v)),
            Raw::Number(v) => Err(serde::de::Error::custom(format!(
                "scale must be positive, got {v}"
            ))),
            Raw::Text(t) if t == "unknown" => Ok(Scale::Unknown),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "scale must be a number or \"unknown\", got \"{t}\""
            ))),
        }
    }
}

/// Counts per measurement operator.
///
/// Counts from a projective set are non-negative. An observable set carries
/// scaled expectation values, which may be negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub labels: Vec<String>,
    pub counts: Vec<f64>,
    pub scale: Scale,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Noiseless expected counts rather than a sample.
    #[serde(default)]
    pub exact: bool,
    /// Per-count variance estimates, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variances: Option<Vec<f64>>,
}

impl CountRecord {
    /// Checks lengths and finiteness; `allow_negative` for observable sets.
    pub fn validate(&self, allow_negative: bool) -> Result<()> {
        if self.labels.len() != self.counts.len() {
            return Err(Error::invalid(
                "labels",
                format!("{} labels for {} counts", self.labels.len(), self.counts.len()),
            ));
        }
        for (i, &c) in self.counts.iter().enumerate() {
            if !c.is_finite() || (!allow_negative && c < 0.0) {
                return Err(Error::invalid(format!("counts[{i}]"), format!("invalid count {c}")));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

fn check_state_matches(rho: &DensityMatrix, ms: &MeasurementSet) -> Result<()> {
    if rho.dim() != ms.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} but measurement operators are {1}x{1}",
            rho.dim(),
            ms.dim()
        )));
    }
    Ok(())
}

fn born_probabilities(rho: &DensityMatrix, ms: &MeasurementSet) -> Vec<f64> {
    ms.operators.iter().map(|mu| rho.expectation(mu)).collect()
}

/// Noiseless counts `𝒩 · Tr[ρ μ_i]`.
pub fn expected_counts(rho: &DensityMatrix, ms: &MeasurementSet, scale: f64) -> Result<CountRecord> {
    check_state_matches(rho, ms)?;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::invalid("scale", "must be positive"));
    }
    let mut counts: Vec<f64> = born_probabilities(rho, ms).iter().map(|p| scale * p).collect();
    if ms.kind == MeasurementKind::Projective {
        // Round-off can push a zero probability a hair below zero.
        for c in counts.iter_mut() {
            *c = c.max(0.0);
        }
    }
    Ok(CountRecord {
        labels: ms.labels.clone(),
        counts,
        scale: Scale::Known(scale),
        seed: None,
        exact: true,
        variances: None,
    })
}

/// Independent Poisson counts with means `𝒩 · Tr[ρ μ_i]`, deterministic
/// under `seed`.
pub fn simulate_counts(
    rho: &DensityMatrix,
    ms: &MeasurementSet,
    scale: f64,
    seed: u64,
) -> Result<CountRecord> {
    if ms.kind != MeasurementKind::Projective {
        return Err(Error::invalid(
            "basis",
            "Poisson sampling needs a projective measurement set",
        ));
    }
    let mut record = expected_counts(rho, ms, scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in record.counts.iter_mut() {
        *c = sample_poisson(&mut rng, *c) as f64;
    }
    record.seed = Some(seed);
    record.exact = false;
    Ok(record)
}

/// Poisson variate: sequential inversion below [`POISSON_INVERSION_LIMIT`],
/// otherwise `round(mean + √mean · z)` clamped at zero.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < POISSON_INVERSION_LIMIT {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p < f64::MIN_POSITIVE && cdf < u {
                // Tail exhausted by round-off.
                break;
            }
        }
        k
    } else {
        let z: f64 = rng.sample(StandardNormal);
        (mean + mean.sqrt() * z).round().max(0.0) as u64
    }
}

/// Counts seen through non-orthogonal analyzers.
///
/// `overlaps[ν]` is the squared overlap `|⟨ψ_ν|ψ'_ν⟩|²`. Each count becomes
/// `n' = n · overlap`; the recorded variance is `n / overlap`, the variance of
/// the orthogonal-equivalent estimate `n'/overlap` when `n'` is itself
/// Poissonian. Both reduce to the orthogonal case as the overlap tends to 1.
pub fn overlap_scaled_counts(orthogonal: &CountRecord, overlaps: &[f64]) -> Result<CountRecord> {
    if overlaps.len() != orthogonal.counts.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} overlaps for {} counts",
            overlaps.len(),
            orthogonal.counts.len()
        )));
    }
    if let Some(&bad) = overlaps.iter().find(|&&o| !(o > 0.0 && o <= 1.0)) {
        return Err(Error::ZeroOverlap(bad));
    }
    let counts = orthogonal.counts.iter().zip(overlaps).map(|(n, o)| n * o).collect();
    let variances = orthogonal.counts.iter().zip(overlaps).map(|(n, o)| n / o).collect();
    Ok(CountRecord {
        counts,
        variances: Some(variances),
        ..orthogonal.clone()
    })
}

/// The H, V, D, L polarization projectors.
pub fn qubit_hvdl() -> MeasurementSet {
    let kets = ["H", "V", "D", "L"]
        .iter()
        .map(|&n| (n.to_string(), named_ket(n, 2).expect("catalogue name")))
        .collect();
    MeasurementSet::from_kets(2, 1, kets).expect("valid kets")
}

/// `|0⟩`, `|1⟩`, `cos θ|0⟩ + sin θ|1⟩` and `cos φ|0⟩ + i sin φ|1⟩`.
///
/// The last two are the analyzers that sit a small angle away from `|0⟩`;
/// `|1⟩` completes the set to the four rows a square A-matrix needs. At
/// `θ = φ = π/4` the set is `{H, V, D, L}`.
pub fn nonorthogonal_qubit_set(theta: f64, phi: f64) -> Result<MeasurementSet> {
    for (name, angle) in [("theta", theta), ("phi", phi)] {
        if !angle.is_finite() {
            return Err(Error::invalid(name, "must be finite"));
        }
        if (2.0 * angle).sin().abs() < 1e-12 {
            return Err(Error::DegenerateSet(format!(
                "{name} = {angle} makes the analyzer coincide with |0⟩ or |1⟩"
            )));
        }
    }
    let kets = vec![
        ("0".to_string(), vec![ONE, ZERO]),
        ("1".to_string(), vec![ZERO, ONE]),
        ("theta+".to_string(), vec![ONE * theta.cos(), ONE * theta.sin()]),
        ("phi+".to_string(), vec![ONE * phi.cos(), I * phi.sin()]),
    ];
    MeasurementSet::from_kets(2, 1, kets)
}

/// The nine qutrit states generated by a balanced three-path interferometer:
/// `|0⟩`, `|1⟩` and seven balanced superpositions
/// `(|0⟩ + α^a|1⟩ + α^b|2⟩)/√3` with `α = e^{2πi/3}`.
pub fn qutrit_nine_state() -> MeasurementSet {
    let a = alpha();
    let a2 = a * a;
    let mut kets = vec![
        ("0".to_string(), vec![ONE, ZERO, ZERO]),
        ("1".to_string(), vec![ZERO, ONE, ZERO]),
    ];
    let balanced = [
        ("bal00", ONE, ONE),
        ("bal12", a, a2),
        ("bal21", a2, a),
        ("bal01", ONE, a),
        ("bal10", a, ONE),
        ("bal02", ONE, a2),
        ("bal20", a2, ONE),
    ];
    for (label, c1, c2) in balanced {
        kets.push((label.to_string(), vec![ONE, c1, c2]));
    }
    MeasurementSet::from_kets(3, 1, kets).expect("valid kets")
}

/// The generators themselves as observables; the A-matrix is the identity.
pub fn qudit_gellmann(d: usize) -> Result<MeasurementSet> {
    let basis = lambda_basis(d)?;
    let labeled = basis
        .into_operators()
        .into_iter()
        .enumerate()
        .map(|(j, op)| (format!("lambda{j}"), op))
        .collect();
    MeasurementSet::from_observables(d, 1, labeled)
}

/// `d²` projectors: every `|k⟩`, and for each pair `k < j` the states
/// `(|k⟩ + |j⟩)/√2` and `(|k⟩ + i|j⟩)/√2`. For `d = 2` this is `{H, V, D, L}`.
pub fn qudit_pairs(d: usize) -> Result<MeasurementSet> {
    check_shape(d, 1)?;
    let unit = |k: usize| {
        let mut v = vec![ZERO; d];
        v[k] = ONE;
        v
    };
    let mut kets: Vec<(String, Vec<Complex64>)> = (0..d).map(|k| (format!("{k}"), unit(k))).collect();
    for k in 0..d {
        for j in k + 1..d {
            let mut plus = vec![ZERO; d];
            plus[k] = ONE * FRAC_1_SQRT_2;
            plus[j] = ONE * FRAC_1_SQRT_2;
            let mut plus_i = plus.clone();
            plus_i[j] = I * FRAC_1_SQRT_2;
            kets.push((format!("{k}+{j}"), plus));
            kets.push((format!("{k}+i{j}"), plus_i));
        }
    }
    MeasurementSet::from_kets(d, 1, kets)
}

/// Resolves a builtin basis id.
///
/// * `qubit-hvdl`
/// * `qubit-nonorth:<theta>:<phi>` (radians)
/// * `qutrit-paper9`
/// * `qudit-gellmann:<d>`
/// * `qudit-pairs:<d>`
/// * `product:<id>x<id>[x<id>…]`
pub fn builtin_basis(id: &str) -> Result<MeasurementSet> {
    let unknown = || Error::UnknownName(format!("builtin basis `{id}`"));
    if let Some(rest) = id.strip_prefix("product:") {
        let parts = rest
            .split('x')
            .map(builtin_basis)
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return Err(unknown());
        }
        return MeasurementSet::product(&parts);
    }
    let mut fields = id.split(':');
    let head = fields.next().unwrap_or_default();
    let args: Vec<&str> = fields.collect();
    let parse_f64 = |s: &str| s.parse::<f64>().map_err(|_| unknown());
    let parse_d = |s: &str| s.parse::<usize>().map_err(|_| unknown());
    match (head, args.as_slice()) {
        ("qubit-hvdl", []) => Ok(qubit_hvdl()),
        ("qubit-nonorth", [t, p]) => nonorthogonal_qubit_set(parse_f64(t)?, parse_f64(p)?),
        ("qutrit-paper9", []) => Ok(qutrit_nine_state()),
        ("qudit-gellmann", [d]) => qudit_gellmann(parse_d(d)?),
        ("qudit-pairs", [d]) => qudit_pairs(parse_d(d)?),
        _ => Err(unknown()),
    }
}

/// Independent expectation values needed: `d^{2n} - 1` in general,
/// `2(d^n - 1)` when the state is known to be pure.
pub fn measurement_budget(d: u64, n: u32, pure: bool) -> u64 {
    if pure {
        2 * (d.pow(n) - 1)
    } else {
        d.pow(2 * n) - 1
    }
}

/// Linear-optics cost of generating (or analyzing) one qudit: number of
/// elements `d² + 3d` and success probability `(1/2)^{d-1}`.
pub fn optics_scaling(d: u64) -> (u64, f64) {
    (d * d + 3 * d, 0.5f64.powi(d as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::tensor_basis;
    use crate::states::named_state;

    fn a_of(ms: &MeasurementSet) -> ComplexMatrix {
        build_a_matrix(ms, &tensor_basis(ms.d(), ms.n_parts()).unwrap()).unwrap()
    }

    #[test]
    fn hvdl_row_for_h() {
        let a = a_of(&qubit_hvdl());
        let row: Vec<f64> = (0..4).map(|j| a[(0, j)].re).collect();
        assert_eq!(row, vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn generator_set_gives_identity_a() {
        for d in 2..=4 {
            let a = a_of(&qudit_gellmann(d).unwrap());
            assert!(a.max_abs_diff(&ComplexMatrix::identity(d * d)) < 1e-12);
        }
    }

    #[test]
    fn nine_state_set_is_complete() {
        let ms = qutrit_nine_state().with_a_matrix(&lambda_basis(3).unwrap()).unwrap();
        assert!(ms.is_complete());
        let kappa = condition_number(ms.a_matrix().unwrap());
        assert!(kappa.is_finite() && kappa < 10.0, "{kappa}");
    }

    #[test]
    fn wrong_count_and_mismatch() {
        let ms = MeasurementSet::from_kets(2, 1, vec![("0".into(), vec![ONE, ZERO])]).unwrap();
        assert!(matches!(
            build_a_matrix(&ms, &lambda_basis(2).unwrap()),
            Err(Error::WrongCount { found: 1, expected: 4 })
        ));
        assert!(matches!(
            build_a_matrix(&qubit_hvdl(), &lambda_basis(3).unwrap()),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn expected_counts_examples() {
        let ms = qubit_hvdl();
        let rec = expected_counts(&DensityMatrix::maximally_mixed(2, 1), &ms, 1000.0).unwrap();
        for c in &rec.counts {
            assert!((c - 500.0).abs() < 1e-9);
        }

        let rec = expected_counts(&named_state("ket0", 3, 1).unwrap(), &qutrit_nine_state(), 900.0).unwrap();
        let expected = [900.0, 0.0, 300.0, 300.0, 300.0, 300.0, 300.0, 300.0, 300.0];
        for (c, e) in rec.counts.iter().zip(expected) {
            assert!((c - e).abs() < 1e-9, "{c} vs {e}");
        }

        let rec = expected_counts(&named_state("D", 2, 1).unwrap(), &ms, 1000.0).unwrap();
        assert!((rec.counts[3] - 500.0).abs() < 1e-9);
    }

    #[test]
    fn simulate_is_deterministic_and_zero_mean_stays_zero() {
        let rho = named_state("H", 2, 1).unwrap();
        let ms = qubit_hvdl();
        let a = simulate_counts(&rho, &ms, 500.0, 9).unwrap();
        let b = simulate_counts(&rho, &ms, 500.0, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts[1], 0.0);
        assert!(!a.exact);
        assert_eq!(a.seed, Some(9));
    }

    #[test]
    fn simulate_rejects_observable_sets() {
        let rho = DensityMatrix::maximally_mixed(2, 1);
        assert!(simulate_counts(&rho, &qudit_gellmann(2).unwrap(), 10.0, 0).is_err());
    }

    #[test]
    fn nonorthogonal_at_quarter_pi_matches_hvdl() {
        let q = std::f64::consts::FRAC_PI_4;
        let ms = nonorthogonal_qubit_set(q, q).unwrap();
        let hvdl = qubit_hvdl();
        for (a, b) in ms.operators().iter().zip(hvdl.operators()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
        let kappa_q = condition_number(&a_of(&ms));
        let kappa_o = condition_number(&a_of(&hvdl));
        assert!((kappa_q - kappa_o).abs() < 1e-9);
        let kappa_small = condition_number(&a_of(&nonorthogonal_qubit_set(0.1, 0.1).unwrap()));
        assert!(kappa_small > kappa_q);
    }

    #[test]
    fn nonorthogonal_overlap_with_zero() {
        let theta: f64 = 0.3;
        let ms = nonorthogonal_qubit_set(theta, 0.5).unwrap();
        let ket0 = named_state("ket0", 2, 1).unwrap();
        let overlap = ket0.expectation(&ms.operators()[2]);
        assert!((overlap - theta.cos().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn nonorthogonal_degenerate_angles() {
        assert!(matches!(nonorthogonal_qubit_set(0.0, 0.3), Err(Error::DegenerateSet(_))));
        assert!(matches!(nonorthogonal_qubit_set(0.3, 0.0), Err(Error::DegenerateSet(_))));
        assert!(matches!(
            nonorthogonal_qubit_set(std::f64::consts::FRAC_PI_2, 0.3),
            Err(Error::DegenerateSet(_))
        ));
    }

    #[test]
    fn overlap_scaling_examples() {
        let rec = CountRecord {
            labels: vec!["a".into()],
            counts: vec![400.0],
            scale: Scale::Unknown,
            seed: None,
            exact: true,
            variances: None,
        };
        let same = overlap_scaled_counts(&rec, &[1.0]).unwrap();
        assert_eq!(same.counts, rec.counts);
        assert_eq!(same.variances, Some(vec![400.0]));
        let scaled = overlap_scaled_counts(&rec, &[0.25]).unwrap();
        assert_eq!(scaled.counts, vec![100.0]);
        assert_eq!(scaled.variances, Some(vec![1600.0]));
        assert!(matches!(overlap_scaled_counts(&rec, &[0.0]), Err(Error::ZeroOverlap(_))));
        assert!(matches!(overlap_scaled_counts(&rec, &[1.5]), Err(Error::ZeroOverlap(_))));
    }

    #[test]
    fn budgets_and_optics() {
        assert_eq!(measurement_budget(2, 2, false), 15);
        assert_eq!(measurement_budget(2, 2, true), 6);
        assert_eq!(measurement_budget(3, 2, false), 80);
        assert_eq!(optics_scaling(3), (18, 0.25));
        assert_eq!(optics_scaling(2), (10, 0.5));
        assert_eq!(optics_scaling(4), (28, 0.125));
    }

    #[test]
    fn builtin_ids() {
        assert_eq!(builtin_basis("qubit-hvdl").unwrap().len(), 4);
        assert_eq!(builtin_basis("qutrit-paper9").unwrap().len(), 9);
        assert_eq!(builtin_basis("qudit-gellmann:4").unwrap().len(), 16);
        assert_eq!(builtin_basis("qudit-pairs:5").unwrap().len(), 25);
        let p = builtin_basis("product:qutrit-paper9xqutrit-paper9").unwrap();
        assert_eq!((p.len(), p.n_parts(), p.dim()), (81, 2, 9));
        assert_eq!(p.labels()[10], "1⊗1");
        let nonorth = builtin_basis("product:qubit-nonorth:0.2:0.3xqubit-hvdl").unwrap();
        assert_eq!(nonorth.len(), 16);
        assert!(builtin_basis("product:qubit-hvdlxqutrit-paper9").is_err());
        assert!(builtin_basis("qubit-nonorth:0.2").is_err());
        assert!(builtin_basis("nope").is_err());
    }

    #[test]
    fn product_kets_match_projectors() {
        let p = builtin_basis("product:qubit-hvdlxqubit-hvdl").unwrap();
        for (ket, op) in p.kets().unwrap().iter().zip(p.operators()) {
            assert!(ComplexMatrix::outer(ket).max_abs_diff(op) < 1e-15);
        }
    }

    #[test]
    fn projector_validation() {
        let not_rank_one = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(MeasurementSet::from_projectors(2, 1, vec![("x".into(), not_rank_one)]).is_err());
        let ok = ComplexMatrix::outer(&[ONE, ZERO]);
        assert!(MeasurementSet::from_projectors(2, 1, vec![("x".into(), ok)]).is_ok());
    }

    #[test]
    fn scale_json() {
        let rec: CountRecord = serde_json::from_str(
            r#"{"labels":["a"],"counts":[3],"scale":"unknown","seed":null}"#,
        )
        .unwrap();
        assert_eq!(rec.scale, Scale::Unknown);
        let s = serde_json::to_string(&CountRecord { scale: Scale::Known(2.5), ..rec }).unwrap();
        assert!(s.contains(r#""scale":2.5"#));
        assert!(serde_json::from_str::<CountRecord>(r#"{"labels":[],"counts":[],"scale":"lots"}"#).is_err());
        assert!(serde_json::from_str::<CountRecord>(r#"{"labels":[],"counts":[],"scale":-1}"#).is_err());
    }
}
