//! Two-qutrit tomography with product measurements and maximum likelihood.

use qudit_tomography::generators::tensor_basis;
use qudit_tomography::measurement::{qutrit_nine_state, simulate_counts, MeasurementSet};
use qudit_tomography::reconstruction::{Method, Reconstructor};
use qudit_tomography::states::{fidelity, named_state};
use qudit_tomography::Result;

fn main() -> Result<()> {
    let single = qutrit_nine_state();
    let ms = MeasurementSet::product(&[single.clone(), single])?;
    let basis = tensor_basis(3, 2)?;
    let rec = Reconstructor::new(&ms, &basis)?;
    println!("{} product projectors, {} generators", ms.len(), basis.len());

    let truth = named_state("max-entangled", 3, 2)?;
    println!("   𝒩     linear λmin   F(projected)  F(mle)    MLE iterations");
    for shots in [50.0, 200.0, 1000.0, 1e4] {
        let counts = simulate_counts(&truth, &ms, shots, 5)?;
        let projected = rec.reconstruct(&counts, Method::Projected)?;
        let mle = rec.reconstruct(&counts, Method::Mle)?;
        println!(
            "{shots:>7}  {:+.4}       {:.5}       {:.5}   {}",
            projected.diagnostics.min_eigenvalue_linear,
            fidelity(&truth, projected.reported())?,
            fidelity(&truth, mle.reported())?,
            mle.diagnostics.mle_iterations.unwrap_or(0)
        );
    }
    Ok(())
}
