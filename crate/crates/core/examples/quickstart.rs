//! Three bands, twenty random-triggered runs, blind recovery.
//!
//! `cargo run --release --example quickstart`

use rtmwcs::harness::ExperimentConfig;
use rtmwcs::harness::TrialSetup;

fn main() -> rtmwcs::Result<()> {
    let cfg = ExperimentConfig::default();
    let setup = TrialSetup::new(&cfg, 0, 3, 20, 30.0)?;
    let acqs = setup.acquire_rt(&cfg, false)?;
    let out = rtmwcs::reconstruct(
        &acqs,
        &setup.phi,
        &setup.grid(),
        &cfg.recovery_options(3, 20),
        Some(&setup.clean.samples),
    )?;

    println!("grid: {:?}", setup.grid());
    for b in &setup.clean.bands {
        println!("band: {:.1} MHz, E = {:.2}, t = {:.2} us", b.carrier / 1e6, b.energy, b.time_offset * 1e6);
    }
    println!("true support:      {:?}", setup.true_support);
    println!("recovered support: {:?}", out.support.indices);
    println!("output SNR: {:.2} dB at 30 dB input", out.output_snr_db.unwrap());
    Ok(())
}
