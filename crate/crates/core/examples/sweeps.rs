//! Runs the three sweeps on the small profile and writes CSV tables.
//!
//! `cargo run --release --example sweeps -- /tmp/sweeps`

use std::fs::File;
use std::path::PathBuf;

use rtmwcs::harness::csv::{write_records, write_summary};
use rtmwcs::harness::{run_m_sweep, run_noise_sweep, run_sparsity_sweep, ExperimentConfig, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("rtmwcs-sweeps"));
    std::fs::create_dir_all(&dir)?;
    let cfg = ExperimentConfig::profile(Profile::Small);

    let tables = [
        run_sparsity_sweep(&cfg)?,
        run_noise_sweep(&cfg)?,
        run_m_sweep(&cfg, false)?,
    ];
    for table in &tables {
        let name = table.kind.name();
        write_records(table, File::create(dir.join(format!("{name}.csv")))?)?;
        write_summary(table, File::create(dir.join(format!("{name}_summary.csv")))?)?;
        println!("{name}:");
        for p in table.summaries() {
            println!(
                "  K={} M={:>2} in={:>5} dB  out {:7.2} +- {:5.2} dB  exact {:.0}%",
                p.k,
                p.m,
                p.input_snr_db,
                p.mean_snr_db,
                p.std_snr_db,
                100.0 * p.exact_rate
            );
        }
    }
    println!("tables in {}", dir.display());
    Ok(())
}
