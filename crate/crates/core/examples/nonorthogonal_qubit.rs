//! Tomography through analyzers a small angle away from the computational
//! basis: still complete, but noisier as the angle shrinks.

use qudit_tomography::generators::lambda_basis;
use qudit_tomography::measurement::{nonorthogonal_qubit_set, simulate_counts};
use qudit_tomography::reconstruction::{Method, Reconstructor};
use qudit_tomography::states::{fidelity, random_physical_state, PurityClass};
use qudit_tomography::Result;

fn main() -> Result<()> {
    let basis = lambda_basis(2)?;
    let shots = 1e4;
    let replicates = 200;
    println!("  angle    κ(A)     mean infidelity");
    for angle in [0.05, 0.1, 0.2, 0.4, std::f64::consts::FRAC_PI_4] {
        let ms = nonorthogonal_qubit_set(angle, angle)?;
        let rec = Reconstructor::new(&ms, &basis)?;
        let mut infid = 0.0;
        for r in 0..replicates {
            let truth = random_physical_state(2, 1, 1000 + r, PurityClass::Mixed);
            let counts = simulate_counts(&truth, &ms, shots, r)?;
            let est = rec.reconstruct(&counts, Method::Projected)?;
            infid += 1.0 - fidelity(&truth, est.reported())?;
        }
        println!(
            "  {angle:.3}  {:>7.2}  {:.2e}",
            rec.condition_number(),
            infid / replicates as f64
        );
    }

    match nonorthogonal_qubit_set(0.0, 0.3) {
        Err(e) => println!("\nθ = 0: {e}"),
        Ok(_) => unreachable!("θ = 0 duplicates |0⟩"),
    }
    Ok(())
}
