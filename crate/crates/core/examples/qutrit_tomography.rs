//! Single-qutrit tomography with the nine-state projector set.

use qudit_tomography::generators::lambda_basis;
use qudit_tomography::measurement::{expected_counts, qutrit_nine_state, simulate_counts};
use qudit_tomography::reconstruction::{Method, Reconstructor};
use qudit_tomography::states::{fidelity, named_state, to_bloch};
use qudit_tomography::Result;

fn main() -> Result<()> {
    let basis = lambda_basis(3)?;
    let ms = qutrit_nine_state();
    let rec = Reconstructor::new(&ms, &basis)?;
    println!("projectors: {}", ms.labels().join(" "));
    println!("condition number {:.3}", rec.condition_number());

    let truth = named_state("bal12", 3, 1)?;
    let exact = rec.linear(&expected_counts(&truth, &ms, 1e4)?)?;
    println!(
        "noiseless: ‖Δρ‖ = {:.1e}, 𝒩̂ = {}",
        (exact.rho_linear.matrix() - truth.matrix()).frobenius_norm(),
        exact.scale_estimate
    );

    let counts = simulate_counts(&truth, &ms, 500.0, 42)?;
    println!("\ncounts at 𝒩 = 500: {:?}", counts.counts);
    for method in [Method::Linear, Method::Projected, Method::Mle] {
        let out = rec.reconstruct(&counts, method)?;
        let est = out.reported();
        let r: Vec<String> = to_bloch(est)?.coefficients()[1..]
            .iter()
            .map(|v| format!("{v:+.2}"))
            .collect();
        println!(
            "{method:<9?} F = {:.5}  λmin = {:+.4}  r = [{}]",
            fidelity(&truth, &out.rho_physical)?,
            est.min_eigenvalue()?,
            r.join(" ")
        );
    }
    Ok(())
}
