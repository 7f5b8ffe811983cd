//! Writes a waveform file, then recovers it through `simulate` as if it had
//! come from outside.

use rtmwcs::harness::files::Waveform;
use rtmwcs::harness::{simulate, ExperimentConfig};
use rtmwcs::signalgen::{generate_multiband, BandSpec};

fn main() -> rtmwcs::Result<()> {
    let cfg = ExperimentConfig { m: 24, ..ExperimentConfig::default() };
    let grid = cfg.grid()?;
    let sig = generate_multiband(
        grid,
        &[BandSpec::new(3.0, 8e6, 18e-6, 455e6), BandSpec::new(5.0, 8e6, 23e-6, 1.02e9)],
    )?;

    let dir = std::env::temp_dir().join("rtmwcs-replay");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("input.txt");
    Waveform { f_nyq: grid.f_nyq(), samples: sig.samples.clone() }.write(&path)?;

    let report = simulate(&cfg, Some(&path), &dir.join("run"))?;
    println!("support {:?}", report.support);
    println!("relative residual {:.3e}", report.relative_residual);
    println!("artifacts in {}", report.out_dir.display());
    Ok(())
}
