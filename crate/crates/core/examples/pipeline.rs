//! One end-to-end run written to a directory: counts, reconstruction and a
//! report, the same files the `pipeline` subcommand produces.

use qudit_tomography::pipeline::{run_pipeline, PipelineConfig, ReportFormat, StateSource};
use qudit_tomography::reconstruction::Method;
use qudit_tomography::states::PurityClass;
use qudit_tomography::Result;

fn main() -> Result<()> {
    let out_dir = std::env::temp_dir().join("qudit-tomo-example");
    let cfg = PipelineConfig {
        state: StateSource::Random { class: PurityClass::Pure, d: 3, n: 2, seed: 4 },
        basis: "product:qutrit-paper9xqutrit-paper9".into(),
        shots: 1e5,
        seed: 4,
        method: Method::Mle,
        exact: false,
        out_dir: Some(out_dir.clone()),
        format: ReportFormat::Json,
    };
    let out = run_pipeline(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&out.report)?);
    println!("files in {}", out_dir.display());
    Ok(())
}
