//! Mean fidelity across a grid of analyzer angles, shot counts and dimensions.

use qudit_tomography::pipeline::{
    sweep, write_sweep_csv, PipelineConfig, ReportFormat, StateSource, SweepAxis, SweepSpec,
};
use qudit_tomography::reconstruction::Method;
use qudit_tomography::states::PurityClass;
use qudit_tomography::Result;

fn main() -> Result<()> {
    let cfg = PipelineConfig {
        state: StateSource::Random { class: PurityClass::Mixed, d: 2, n: 1, seed: 17 },
        basis: "qubit-hvdl".into(),
        shots: 1e4,
        seed: 1,
        method: Method::Projected,
        exact: false,
        out_dir: None,
        format: ReportFormat::Csv,
    };
    let axes = [
        SweepAxis::Theta(vec![0.05, 0.1, 0.2, 0.4, 0.785]),
        SweepAxis::Shots(vec![1e2, 1e3, 1e4, 1e5]),
        SweepAxis::D(vec![2, 3, 4, 5]),
    ];
    for axis in axes {
        let rows = sweep(&cfg, &SweepSpec { axis, replicates: 50 })?;
        write_sweep_csv(std::io::stdout(), &rows)?;
        println!();
    }
    Ok(())
}
