//! Chip rows and the measurement matrix they induce.

use rtmwcs::chipseq::{build_phi, fourier_coeffs, generate_chips};
use rtmwcs::GridConfig;

fn main() -> rtmwcs::Result<()> {
    let grid = GridConfig::new(2.5e9, 17, 65)?;
    let chips = generate_chips(grid, 4, 42);
    print!("{}", chips.to_text());

    let c = fourier_coeffs(chips.row(0));
    let l0 = c.len() / 2;
    println!("row 0 coefficients (q = -{l0}..={l0}):");
    for (i, v) in c.iter().enumerate() {
        println!("  q = {:>3}: |c| = {:.4}", i as i64 - l0 as i64, v.norm());
    }
    let power: f64 = c.iter().map(|v| v.norm_sqr()).sum();
    println!("in-band power {power:.4} (the whole row carries 1)");

    let phi = build_phi(&chips);
    let gram = phi.entries.adjoint() * &phi.entries;
    let mut worst: f64 = 0.0;
    for i in 0..grid.slices() {
        for j in 0..i {
            worst = worst.max(gram[(i, j)].norm() / (gram[(i, i)].norm() * gram[(j, j)].norm()).sqrt());
        }
    }
    println!("{} x {} matrix, worst column coherence {worst:.3}", phi.m(), phi.slices());
    Ok(())
}
