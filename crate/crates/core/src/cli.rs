//! Command-line front end (`qudit-tomo`).
//!
//! Exit status is 0 on success, 1 on a validation failure and 2 on a
//! numerical failure; failures print `{"error": {"kind", "field"?, "message"}}`
//! to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::formats::{self, ReconstructionFile};
use crate::generators::tensor_basis;
use crate::measurement::{expected_counts, measurement_budget, optics_scaling, simulate_counts};
use crate::pipeline::{
    run_pipeline, sweep, write_sweep_csv, PipelineConfig, ReportFormat, StateSource, SweepAxis,
    SweepSpec,
};
use crate::reconstruction::{Method, Reconstructor};
use crate::states::{fidelity, named_state, random_physical_state, PurityClass};

#[derive(Debug, Parser)]
#[command(name = "qudit-tomo", version, about = "Quantum state tomography for n-qudit systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (a directory for `pipeline`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Use noiseless expected counts instead of Poisson samples.
    #[arg(long, global = true)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Linear,
    Projected,
    Mle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Linear => Method::Linear,
            MethodArg::Projected => Method::Projected,
            MethodArg::Mle => Method::Mle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Pure,
    Mixed,
}

impl From<ClassArg> for PurityClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Pure => PurityClass::Pure,
            ClassArg::Mixed => PurityClass::Mixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Theta,
    Shots,
    D,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the ordered generator basis as a JSON array of matrices.
    GenBasis {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Write a named or random density matrix.
    GenState {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Simulate counts for a state and measurement set.
    Simulate {
        #[arg(long)]
        state: PathBuf,
        /// Measurement-set file or builtin id.
        #[arg(long)]
        basis: String,
        #[arg(long)]
        shots: f64,
    },
    /// Reconstruct a density matrix from counts.
    Reconstruct {
        #[arg(long)]
        counts: PathBuf,
        #[arg(long)]
        basis: String,
        #[arg(long, value_enum, default_value = "projected")]
        method: MethodArg,
    },
    /// Fidelity between two state (or reconstruction) files.
    Fidelity {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Number of independent measurements needed for n qudits.
    Budget {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// The state is known to be pure.
        #[arg(long)]
        pure: bool,
    },
    /// Mean and spread of the fidelity over a parameter grid.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        replicates: usize,
    },
    /// State → counts → reconstruction → report.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Builtin state name (`ket<k>`, `H`, `V`, `D`, `L`, `bal<a><b>`, `mixed`, `max-entangled`).
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub name: Option<String>,
    /// Random state of the given purity class.
    #[arg(long, value_enum)]
    pub random: Option<ClassArg>,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// State file.
    #[arg(long, conflicts_with_all = ["name", "random"])]
    pub state: Option<PathBuf>,
    #[arg(long, conflicts_with = "random")]
    pub name: Option<String>,
    #[arg(long, value_enum)]
    pub random: Option<ClassArg>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Seed for a random state; defaults to `--seed`.
    #[arg(long)]
    pub state_seed: Option<u64>,
    /// Measurement-set file or builtin id.
    #[arg(long)]
    pub basis: String,
    #[arg(long, default_value_t = 1e6)]
    pub shots: f64,
    #[arg(long, value_enum, default_value = "projected")]
    pub method: MethodArg,
}

impl RunArgs {
    fn state_source(&self, seed: u64) -> Result<StateSource> {
        if let Some(path) = &self.state {
            return Ok(StateSource::File { path: path.clone() });
        }
        let d = self
            .d
            .ok_or_else(|| Error::invalid("d", "required with --name or --random"))?;
        match (&self.name, self.random) {
            (Some(name), None) => Ok(StateSource::Builtin { name: name.clone(), d, n: self.n }),
            (None, Some(class)) => Ok(StateSource::Random {
                class: class.into(),
                d,
                n: self.n,
                seed: self.state_seed.unwrap_or(seed),
            }),
            _ => Err(Error::invalid("state", "give one of --state, --name or --random")),
        }
    }
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(out, &text)
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.command {
        Command::GenBasis { d, n } => {
            let basis = tensor_basis(d, n)?;
            emit_json(out, &basis.operators())
        }
        Command::GenState { state } => {
            let rho = match (state.name, state.random) {
                (Some(name), _) => named_state(&name, state.d, state.n)?,
                (None, Some(class)) => random_physical_state(state.d, state.n, seed, class.into()),
                (None, None) => return Err(Error::invalid("name", "give --name or --random")),
            };
            emit_json(out, &formats::StateFile::from(&rho))
        }
        Command::Simulate { state, basis, shots } => {
            let rho = formats::read_state(&state)?;
            let ms = formats::resolve_basis(&basis)?;
            let counts = if cli.exact {
                let mut c = expected_counts(&rho, &ms, shots)?;
                c.seed = Some(seed);
                c
            } else {
                simulate_counts(&rho, &ms, shots, seed)?
            };
            emit_json(out, &counts)
        }
        Command::Reconstruct { counts, basis, method } => {
            let counts = formats::read_counts(&counts)?;
            let ms = formats::resolve_basis(&basis)?;
            let gb = tensor_basis(ms.d(), ms.n_parts())?;
            let rec = Reconstructor::new(&ms, &gb)?.reconstruct(&counts, method.into())?;
            emit_json(out, &ReconstructionFile::from(&rec))
        }
        Command::Fidelity { a, b } => {
            let f = fidelity(&formats::read_state(&a)?, &formats::read_state(&b)?)?;
            match cli.format {
                Some(Format::Csv) => emit_text(out, &format!("fidelity\n{f}\n")),
                _ => emit_json(out, &json!({ "fidelity": f })),
            }
        }
        Command::Budget { d, n, pure } => {
            if d < 2 || n < 1 {
                return Err(Error::invalid("d", "need d >= 2 and n >= 1"));
            }
            let measurements = measurement_budget(d, n, pure);
            let (elements, success) = optics_scaling(d);
            match cli.format {
                Some(Format::Csv) => emit_text(
                    out,
                    &format!(
                        "d,n,pure,measurements,optical_elements,success_probability\n{d},{n},{pure},{measurements},{elements},{success}\n"
                    ),
                ),
                _ => emit_json(
                    out,
                    &json!({
                        "d": d,
                        "n": n,
                        "pure": pure,
                        "measurements": measurements,
                        "optical_elements": elements,
                        "success_probability": success,
                    }),
                ),
            }
        }
        Command::Sweep { run, axis, values, replicates } => {
            let cfg = PipelineConfig {
                state: run.state_source(seed)?,
                basis: run.basis.clone(),
                shots: run.shots,
                seed,
                method: run.method.into(),
                exact: cli.exact,
                out_dir: None,
                format: ReportFormat::Csv,
            };
            let axis = match axis {
                AxisArg::Theta => SweepAxis::Theta(values),
                AxisArg::Shots => SweepAxis::Shots(values),
                AxisArg::D => SweepAxis::D(
                    values
                        .iter()
                        .map(|&v| {
                            if v >= 2.0 && v.fract() == 0.0 {
                                Ok(v as usize)
                            } else {
                                Err(Error::invalid("values", format!("{v} is not a dimension")))
                            }
                        })
                        .collect::<Result<_>>()?,
                ),
            };
            let rows = sweep(&cfg, &SweepSpec { axis, replicates })?;
            match cli.format {
                Some(Format::Json) => emit_json(out, &rows),
                _ => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&mut buf, &rows)?;
                    emit_text(out, &String::from_utf8_lossy(&buf))
                }
            }
        }
        Command::Pipeline { run } => {
            let cfg = PipelineConfig {
                state: run.state_source(seed)?,
                basis: run.basis.clone(),
                shots: run.shots,
                seed,
                method: run.method.into(),
                exact: cli.exact,
                out_dir: cli.out.clone(),
                format: match cli.format {
                    Some(Format::Csv) => ReportFormat::Csv,
                    _ => ReportFormat::Json,
                },
            };
            let output = run_pipeline(&cfg)?;
            if cfg.out_dir.is_none() {
                emit_json(None, &output.report)?;
            }
            Ok(())
        }
    }
}

/// Machine-readable error document.
pub fn error_json(err: &Error) -> serde_json::Value {
    let mut body = json!({ "kind": err.kind(), "message": err.to_string() });
    if let Error::Invalid { field, .. } = err {
        body["field"] = json!(field);
    }
    json!({ "error": body })
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        2
    } else {
        1
    }
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let doc = json!({ "error": { "kind": "usage", "message": e.to_string() } });
            eprintln!("{doc}");
            return 1;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", error_json(&err));
            exit_code(&err)
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(main_with_args(["qudit-tomo", "budget"]), 1);
        assert_eq!(main_with_args(["qudit-tomo", "no-such-command"]), 1);
    }

    #[test]
    fn numerical_errors_exit_2() {
        let err = Error::IncompleteSet { condition: f64::INFINITY };
        assert_eq!(exit_code(&err), 2);
        assert_eq!(error_json(&err)["error"]["kind"], err.kind());
    }

    #[test]
    fn validation_errors_name_the_field() {
        let err = Error::invalid("elements[2].ket", "expected [re, im]");
        assert_eq!(exit_code(&err), 1);
        assert_eq!(error_json(&err)["error"]["field"], "elements[2].ket");
    }
}
