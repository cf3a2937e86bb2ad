//! End-to-end experiment runs: state → counts → reconstruction → report, and
//! parameter sweeps over the same path.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{self, ReconstructionFile, SCHEMA_VERSION};
use crate::generators::{tensor_basis, GeneratorBasis};
use crate::measurement::{
    builtin_basis, expected_counts, measurement_budget, simulate_counts, CountRecord,
    MeasurementSet,
};
use crate::reconstruction::{Method, ReconstructionResult, Reconstructor};
use crate::states::{fidelity, named_state, random_physical_state, DensityMatrix, PurityClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum StateSource {
    File { path: PathBuf },
    Builtin { name: String, d: usize, n: usize },
    Random { class: PurityClass, d: usize, n: usize, seed: u64 },
}

impl StateSource {
    /// Materializes the state, with `d` overridden for sweeps over dimension.
    fn resolve(&self, d_override: Option<usize>) -> Result<DensityMatrix> {
        match (self, d_override) {
            (StateSource::File { path }, None) => formats::read_state(path),
            (StateSource::File { .. }, Some(_)) => Err(Error::invalid(
                "state",
                "a state file has a fixed dimension and cannot be swept over d",
            )),
            (StateSource::Builtin { name, d, n }, o) => named_state(name, o.unwrap_or(*d), *n),
            (StateSource::Random { class, d, n, seed }, o) => {
                Ok(random_physical_state(o.unwrap_or(*d), *n, *seed, *class))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub state: StateSource,
    /// Builtin basis id or measurement-set file path.
    pub basis: String,
    /// Expected counts per projector at unit probability, `𝒩`.
    pub shots: f64,
    pub seed: u64,
    pub method: Method,
    /// Noiseless expected counts instead of Poisson samples.
    pub exact: bool,
    pub out_dir: Option<PathBuf>,
    pub format: ReportFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub mixed: u64,
    pub pure: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub counts_ms: f64,
    pub reconstruct_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema: u32,
    pub d: usize,
    pub n: usize,
    pub basis: String,
    pub shots: f64,
    pub seed: u64,
    pub exact: bool,
    pub method: Method,
    pub fidelity: f64,
    /// Which estimate the fidelity refers to: the reported one, or its
    /// physical projection when the reported one has negative eigenvalues.
    pub fidelity_estimate: String,
    pub purity_true: f64,
    pub purity_estimate: f64,
    pub scale_estimate: f64,
    pub condition_number: f64,
    pub min_eigenvalue_linear: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle_iterations: Option<usize>,
    pub budget: Budget,
    pub timings: Timings,
}

/// Everything produced by one run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub counts: CountRecord,
    pub reconstruction: ReconstructionResult,
    pub report: PipelineReport,
}

fn basis_for(ms: &MeasurementSet) -> Result<GeneratorBasis> {
    tensor_basis(ms.d(), ms.n_parts())
}

fn check_shapes(rho: &DensityMatrix, ms: &MeasurementSet) -> Result<()> {
    if rho.d() != ms.d() || rho.n_parts() != ms.n_parts() {
        return Err(Error::invalid(
            "basis",
            format!(
                "state is (d = {}, n = {}) but basis is (d = {}, n = {})",
                rho.d(),
                rho.n_parts(),
                ms.d(),
                ms.n_parts()
            ),
        ));
    }
    Ok(())
}

/// Fidelity to the truth of the estimate `method` reports, falling back to
/// the projected estimate when that one is not positive semidefinite.
fn score(truth: &DensityMatrix, rec: &ReconstructionResult) -> Result<(f64, &'static str)> {
    let reported = rec.reported();
    if rec.method == Method::Linear && !reported.is_physical() {
        Ok((fidelity(truth, &rec.rho_physical)?, "projected"))
    } else {
        Ok((fidelity(truth, reported)?, "reported"))
    }
}

struct Replicate {
    counts: CountRecord,
    reconstruction: ReconstructionResult,
    fidelity: f64,
    fidelity_estimate: &'static str,
    counts_ms: f64,
    reconstruct_ms: f64,
}

fn run_replicate(
    truth: &DensityMatrix,
    reconstructor: &Reconstructor<'_>,
    shots: f64,
    seed: u64,
    method: Method,
    exact: bool,
) -> Result<Replicate> {
    let ms = reconstructor.measurement_set();
    let t0 = Instant::now();
    let counts = if exact {
        let mut c = expected_counts(truth, ms, shots)?;
        c.seed = Some(seed);
        c
    } else {
        simulate_counts(truth, ms, shots, seed)?
    };
    let t1 = Instant::now();
    let reconstruction = reconstructor.reconstruct(&counts, method)?;
    let t2 = Instant::now();
    let (fid, which) = score(truth, &reconstruction)?;
    Ok(Replicate {
        counts,
        reconstruction,
        fidelity: fid,
        fidelity_estimate: which,
        counts_ms: (t1 - t0).as_secs_f64() * 1e3,
        reconstruct_ms: (t2 - t1).as_secs_f64() * 1e3,
    })
}

/// Runs one experiment and, when `out_dir` is set, writes `counts.json`,
/// `reconstruction.json` and `report.json` (or `report.csv`).
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let start = Instant::now();
    if !(cfg.shots.is_finite() && cfg.shots > 0.0) {
        return Err(Error::invalid("shots", "must be positive"));
    }
    let truth = cfg.state.resolve(None)?;
    let ms = formats::resolve_basis(&cfg.basis)?;
    check_shapes(&truth, &ms)?;
    let basis = basis_for(&ms)?;
    let reconstructor = Reconstructor::new(&ms, &basis)?;
    let rep = run_replicate(&truth, &reconstructor, cfg.shots, cfg.seed, cfg.method, cfg.exact)?;

    let diag = &rep.reconstruction.diagnostics;
    let report = PipelineReport {
        schema: SCHEMA_VERSION,
        d: truth.d(),
        n: truth.n_parts(),
        basis: cfg.basis.clone(),
        shots: cfg.shots,
        seed: cfg.seed,
        exact: cfg.exact,
        method: cfg.method,
        fidelity: rep.fidelity,
        fidelity_estimate: rep.fidelity_estimate.to_string(),
        purity_true: truth.purity(),
        purity_estimate: rep.reconstruction.reported().purity(),
        scale_estimate: rep.reconstruction.scale_estimate,
        condition_number: diag.condition_number,
        min_eigenvalue_linear: diag.min_eigenvalue_linear,
        mle_iterations: diag.mle_iterations,
        budget: Budget {
            mixed: measurement_budget(truth.d() as u64, truth.n_parts() as u32, false),
            pure: measurement_budget(truth.d() as u64, truth.n_parts() as u32, true),
        },
        timings: Timings {
            counts_ms: rep.counts_ms,
            reconstruct_ms: rep.reconstruct_ms,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };

    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
        formats::write_json(&dir.join("counts.json"), &rep.counts)?;
        formats::write_json(
            &dir.join("reconstruction.json"),
            &ReconstructionFile::from(&rep.reconstruction),
        )?;
        match cfg.format {
            ReportFormat::Json => formats::write_json(&dir.join("report.json"), &report)?,
            ReportFormat::Csv => write_report_csv(&dir.join("report.csv"), &report)?,
        }
    }
    Ok(PipelineOutput {
        counts: rep.counts,
        reconstruction: rep.reconstruction,
        report,
    })
}

fn write_report_csv(path: &std::path::Path, report: &PipelineReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "d", "n", "basis", "shots", "seed", "exact", "method", "fidelity", "fidelity_estimate",
        "purity_true", "purity_estimate", "scale_estimate", "condition_number",
        "min_eigenvalue_linear", "budget_mixed", "budget_pure", "total_ms",
    ])?;
    w.write_record([
        report.d.to_string(),
        report.n.to_string(),
        report.basis.clone(),
        report.shots.to_string(),
        report.seed.to_string(),
        report.exact.to_string(),
        format!("{:?}", report.method).to_lowercase(),
        report.fidelity.to_string(),
        report.fidelity_estimate.clone(),
        report.purity_true.to_string(),
        report.purity_estimate.to_string(),
        report.scale_estimate.to_string(),
        report.condition_number.to_string(),
        report.min_eigenvalue_linear.to_string(),
        report.budget.mixed.to_string(),
        report.budget.pure.to_string(),
        report.timings.total_ms.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// The swept parameter and its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "lowercase")]
pub enum SweepAxis {
    /// Analyzer angle of the non-orthogonal qubit set, `θ = φ`, in radians.
    Theta(Vec<f64>),
    Shots(Vec<f64>),
    /// Qudit dimension, measured with the `qudit-pairs:<d>` set.
    D(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub replicates: usize,
}

/// One CSV row per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub d: usize,
    pub n: usize,
    pub basis: String,
    pub shots: f64,
    pub replicates: usize,
    pub budget: u64,
    pub condition_number: f64,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub mean_infidelity: f64,
    pub failures: usize,
    pub error: String,
}

fn product_id(single: &str, n: usize) -> String {
    if n == 1 {
        single.to_string()
    } else {
        format!("product:{}", vec![single; n].join("x"))
    }
}

fn state_n(source: &StateSource, fallback: usize) -> usize {
    match source {
        StateSource::Builtin { n, .. } | StateSource::Random { n, .. } => *n,
        StateSource::File { .. } => fallback,
    }
}

/// Replicate `r` at a grid point uses seed `cfg.seed + r`; results do not
/// depend on scheduling.
pub fn sweep(cfg: &PipelineConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.replicates == 0 {
        return Err(Error::invalid("replicates", "must be at least 1"));
    }
    let points: Vec<(String, f64, Option<usize>, String, f64)> = match &spec.axis {
        SweepAxis::Theta(grid) => {
            let n = state_n(&cfg.state, 1);
            grid.iter()
                .map(|&t| ("theta".into(), t, None, product_id(&format!("qubit-nonorth:{t}:{t}"), n), cfg.shots))
                .collect()
        }
        SweepAxis::Shots(grid) => grid
            .iter()
            .map(|&s| ("shots".into(), s, None, cfg.basis.clone(), s))
            .collect(),
        SweepAxis::D(grid) => {
            let n = state_n(&cfg.state, 1);
            grid.iter()
                .map(|&d| ("d".into(), d as f64, Some(d), product_id(&format!("qudit-pairs:{d}"), n), cfg.shots))
                .collect()
        }
    };
    if points.is_empty() {
        return Err(Error::invalid("values", "empty sweep grid"));
    }
    Ok(points
        .into_iter()
        .map(|(axis, value, d_override, basis_id, shots)| {
            sweep_point(cfg, spec.replicates, axis, value, d_override, basis_id, shots)
        })
        .collect())
}

fn sweep_point(
    cfg: &PipelineConfig,
    replicates: usize,
    axis: String,
    value: f64,
    d_override: Option<usize>,
    basis_id: String,
    shots: f64,
) -> SweepRow {
    let mut row = SweepRow {
        axis,
        value,
        d: d_override.unwrap_or(0),
        n: 0,
        basis: basis_id.clone(),
        shots,
        replicates,
        budget: 0,
        condition_number: f64::NAN,
        mean_fidelity: f64::NAN,
        std_fidelity: f64::NAN,
        mean_infidelity: f64::NAN,
        failures: replicates,
        error: String::new(),
    };
    let setup = (|| -> Result<(DensityMatrix, MeasurementSet)> {
        let truth = cfg.state.resolve(d_override)?;
        let ms = if basis_id == cfg.basis {
            formats::resolve_basis(&basis_id)?
        } else {
            builtin_basis(&basis_id)?
        };
        check_shapes(&truth, &ms)?;
        Ok((truth, ms))
    })();
    let (truth, ms) = match setup {
        Ok(v) => v,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    row.d = truth.d();
    row.n = truth.n_parts();
    row.budget = measurement_budget(row.d as u64, row.n as u32, false);
    let basis = match basis_for(&ms) {
        Ok(b) => b,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    let reconstructor = match Reconstructor::new(&ms, &basis) {
        Ok(r) => r,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    row.condition_number = reconstructor.condition_number();

    let results: Vec<Result<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            run_replicate(&truth, &reconstructor, shots, cfg.seed + r as u64, cfg.method, cfg.exact)
                .map(|rep| rep.fidelity)
        })
        .collect();
    let mut fids = Vec::with_capacity(replicates);
    for res in results {
        match res {
            Ok(f) => fids.push(f),
            Err(e) if row.error.is_empty() => row.error = e.to_string(),
            Err(_) => {}
        }
    }
    row.failures = replicates - fids.len();
    if !fids.is_empty() {
        let k = fids.len() as f64;
        let mean = fids.iter().sum::<f64>() / k;
        let var = if fids.len() > 1 {
            fids.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        row.mean_fidelity = mean;
        row.std_fidelity = var.sqrt();
        row.mean_infidelity = fids.iter().map(|f| 1.0 - f).sum::<f64>() / k;
    }
    row
}

/// Writes sweep rows as CSV with a header line.
pub fn write_sweep_csv<W: std::io::Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
