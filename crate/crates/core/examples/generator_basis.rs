//! Builds the ordered SU(d) generator basis and checks its algebra.
//!
//! Run with `cargo run --example generator_basis -- 4`.

use qudit_tomography::generators::{gram_matrix, lambda_basis, slot_map, tensor_basis};
use qudit_tomography::Result;

fn main() -> Result<()> {
    let d: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let basis = lambda_basis(d)?;

    println!("d = {d}: {} operators", basis.len());
    for (j, kind) in slot_map(d).iter().enumerate() {
        println!("  λ{j:<2} {kind:?}");
    }

    // Off-diagonal Gram entries vanish; diagonal is d for λ0 and 2 otherwise.
    let g = gram_matrix(basis.operators());
    let mut off = 0.0f64;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            if i != j {
                off = off.max(g[(i, j)].norm());
            }
        }
    }
    let traces: Vec<f64> = basis.operators()[1..].iter().map(|m| m.trace().norm()).collect();
    println!("max |Tr[λi λj]| (i ≠ j) = {off:.1e}");
    println!("max |Tr[λj]| (j ≥ 1)    = {:.1e}", traces.iter().cloned().fold(0.0, f64::max));
    println!("Tr[λ0²] = {}, Tr[λ1²] = {}", g[(0, 0)].re, g[(1, 1)].re);

    let two = tensor_basis(d, 2)?;
    println!("\ntwo qudits: {} operators", two.len());
    for flat in [0, 1, d * d, d * d + 1] {
        println!(
            "  Λ{flat:<3} = λ{:?}  Tr[Λ²] = {}",
            two.multi_index(flat),
            two.norm_sqr(flat)
        );
    }
    Ok(())
}
