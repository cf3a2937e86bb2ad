//! Converts between density matrices and Bloch vectors.

use qudit_tomography::states::{catalogue, from_bloch, named_state, to_bloch};
use qudit_tomography::Result;

fn main() -> Result<()> {
    for (d, n) in [(2, 1), (3, 1), (2, 2)] {
        println!("d = {d}, n = {n}");
        for name in catalogue(d, n) {
            let rho = named_state(&name, d, n)?;
            let b = to_bloch(&rho)?;
            let back = from_bloch(&b)?;
            let err = (back.matrix() - rho.matrix()).frobenius_norm();
            let r: Vec<String> = b.coefficients().iter().map(|v| format!("{v:+.3}")).collect();
            println!(
                "  {name:<14} Σr² = {:.3}  purity = {:.3}  round trip {err:.1e}",
                b.length_sqr(),
                rho.purity()
            );
            if r.len() <= 9 {
                println!("    r = [{}]", r.join(", "));
            }
        }
    }
    println!("\npure single qudits sit on Σr² = d(d-1)/2: 1 for qubits, 3 for qutrits");
    Ok(())
}
