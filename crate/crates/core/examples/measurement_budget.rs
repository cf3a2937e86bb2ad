//! How the measurement count and the linear-optics cost grow with d and n.

use qudit_tomography::measurement::{measurement_budget, optics_scaling};

fn main() {
    println!("measurements for n qudits (mixed / known pure)");
    println!("  d   n=1        n=2          n=3");
    for d in 2..=6u64 {
        let cells: Vec<String> = (1..=3)
            .map(|n| format!("{:>5} / {:<4}", measurement_budget(d, n, false), measurement_budget(d, n, true)))
            .collect();
        println!("  {d}   {}", cells.join("  "));
    }

    println!("\nlinear optics per qudit");
    println!("  d   elements   success probability");
    for d in 2..=8u64 {
        let (elements, p) = optics_scaling(d);
        println!("  {d}   {elements:>8}   {p:.4}");
    }
}
