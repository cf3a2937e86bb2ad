//! Poisson count noise and its propagation to the Bloch vector, compared with
//! a Monte Carlo estimate.

use qudit_tomography::generators::lambda_basis;
use qudit_tomography::measurement::{expected_counts, qubit_hvdl, simulate_counts};
use qudit_tomography::reconstruction::Reconstructor;
use qudit_tomography::states::{named_state, to_bloch};
use qudit_tomography::Result;

fn main() -> Result<()> {
    let basis = lambda_basis(2)?;
    let ms = qubit_hvdl();
    let rec = Reconstructor::new(&ms, &basis)?;
    let truth = named_state("D", 2, 1)?;
    let shots = 1000.0;

    let predicted = rec.covariance(&expected_counts(&truth, &ms, shots)?)?;

    let replicates = 5000u64;
    let mut sum = [0.0; 4];
    let mut sum_sq = [0.0; 4];
    for seed in 0..replicates {
        let counts = simulate_counts(&truth, &ms, shots, seed)?;
        let r = to_bloch(&rec.linear(&counts)?.rho_linear)?;
        for (j, v) in r.coefficients().iter().enumerate() {
            sum[j] += v;
            sum_sq[j] += v * v;
        }
    }
    let k = replicates as f64;
    println!("state |D⟩, 𝒩 = {shots}, {replicates} Poisson replicates");
    println!("  j   mean r_j   Monte Carlo var   predicted var");
    for j in 1..4 {
        let mean = sum[j] / k;
        let var = sum_sq[j] / k - mean * mean;
        println!("  {j}   {mean:+.4}    {var:.3e}         {:.3e}", predicted.get(j, j));
    }
    Ok(())
}
