//! Builds a multiband test signal, adds noise at a chosen SNR, and shows
//! where its energy lands among the spectral slices.

use rtmwcs::signalgen::{add_awgn, generate_multiband, snr_db, true_support_slices, BandSpec};
use rtmwcs::GridConfig;

fn main() -> rtmwcs::Result<()> {
    let grid = GridConfig::new(2.5e9, 197, 513)?;
    let bands = [
        BandSpec::new(2.0, 10e6, 15e-6, 310e6),
        BandSpec::new(6.0, 10e6, 22e-6, 745e6),
    ];
    let sig = generate_multiband(grid, &bands)?;
    println!("{} samples over {:.2} us, energy {:.4}", grid.len(), grid.duration() * 1e6, sig.energy());
    println!("occupation: {:.4} of the band", sig.occupation_q());

    let s = sig.slice_spectra();
    let per_slice: Vec<f64> = (0..grid.slices())
        .map(|r| s.row(r).iter().map(|c| c.norm_sqr()).sum())
        .collect();
    let total: f64 = per_slice.iter().sum();
    for l in true_support_slices(&sig) {
        println!(
            "slice {l:>3} centered at {:>8.2} MHz holds {:5.1}%",
            grid.slice_center(l) / 1e6,
            100.0 * per_slice[l - 1] / total
        );
    }

    for target in [10.0, 20.0, 40.0] {
        let noisy = add_awgn(&sig, target, 7);
        println!("asked {target} dB, got {:.2} dB", snr_db(&sig.samples, &noisy.samples, 0.0)?);
    }
    Ok(())
}
