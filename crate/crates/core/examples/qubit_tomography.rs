//! Polarization-qubit tomography with the H, V, D, L projectors.

use qudit_tomography::generators::lambda_basis;
use qudit_tomography::measurement::{build_a_matrix, qubit_hvdl, simulate_counts};
use qudit_tomography::reconstruction::{Method, Reconstructor};
use qudit_tomography::states::{fidelity, random_physical_state, PurityClass};
use qudit_tomography::Result;

fn main() -> Result<()> {
    let basis = lambda_basis(2)?;
    let ms = qubit_hvdl();

    let a = build_a_matrix(&ms, &basis)?;
    println!("A-matrix (rows H, V, D, L; columns λ0..λ3):");
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| format!("{:+.2}", a[(i, j)].re)).collect();
        println!("  {}", row.join("  "));
    }

    let truth = random_physical_state(2, 1, 11, PurityClass::Pure);
    let rec = Reconstructor::new(&ms, &basis)?;
    println!("\ncondition number {:.3}", rec.condition_number());
    for shots in [1e2, 1e3, 1e4, 1e5] {
        let counts = simulate_counts(&truth, &ms, shots, 7)?;
        let out = rec.reconstruct(&counts, Method::Projected)?;
        println!(
            "𝒩 = {shots:>7}: counts {:?}  𝒩̂ = {:.1}  λmin(linear) = {:+.4}  F = {:.6}",
            counts.counts,
            out.scale_estimate,
            out.diagnostics.min_eigenvalue_linear,
            fidelity(&truth, out.reported())?
        );
    }
    Ok(())
}
