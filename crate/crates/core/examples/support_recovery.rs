//! Compares the three greedy scoring rules on the same noisy trials.

use rtmwcs::harness::trial::evaluate;
use rtmwcs::harness::{ExperimentConfig, TrialSetup};
use rtmwcs::Pursuit;

fn main() -> rtmwcs::Result<()> {
    let (k, m, snr) = (3, 20, 20.0);
    for pursuit in [Pursuit::Somp, Pursuit::Ormp, Pursuit::RankAware] {
        let cfg = ExperimentConfig { pursuit, ..ExperimentConfig::default() };
        let (mut exact, mut total) = (0, 0.0);
        for trial in 0..cfg.trials {
            let setup = TrialSetup::new(&cfg, trial, k, m, snr)?;
            let acqs = setup.acquire_rt(&cfg, false)?;
            let out = evaluate(&cfg, &setup, &acqs, k, m, snr)?;
            exact += usize::from(out.exact_support());
            total += out.output_snr_db;
        }
        println!(
            "{pursuit:?}: exact support {exact}/{}, mean output SNR {:.2} dB",
            cfg.trials,
            total / cfg.trials as f64
        );
    }
    Ok(())
}
