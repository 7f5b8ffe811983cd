use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rtmwcs::acquisition::SamplingMode;
use rtmwcs::harness::csv::{read_summary_series, write_records, write_summary, write_timing};
use rtmwcs::harness::plot::{line_chart, series_from_rows};
use rtmwcs::harness::{
    run_m_sweep, run_noise_sweep, run_sparsity_sweep, simulate, ExperimentConfig, Profile, SweepTable,
};
use rtmwcs::Pursuit;

/// Random-triggered modulated wideband converter simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// One end-to-end run with all artifacts written to the output directory.
    Simulate {
        /// Replay a waveform file instead of drawing bands.
        #[arg(long)]
        signal: Option<PathBuf>,
    },
    /// Output SNR against the number of bands.
    SweepSparsity,
    /// Output SNR against input SNR.
    SweepNoise,
    /// Output SNR against the number of acquisition runs.
    SweepM,
    /// The run-count sweep with the synchronous multi-channel baseline alongside.
    CompareMwc,
}

#[derive(Args)]
struct Common {
    /// TOML file layered over the profile.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "desk")]
    profile: Profile,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Number of bands.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Number of acquisition runs.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Input SNR in dB; `inf` for noiseless.
    #[arg(long, global = true)]
    snr: Option<f64>,
    #[arg(long, global = true)]
    max_bands: Option<usize>,
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    /// Sample at the true trigger offset instead of the quantized one.
    #[arg(long, global = true)]
    misaligned: bool,
    #[arg(long, global = true)]
    tau_jitter: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pursuit: Option<PursuitArg>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PursuitArg {
    Somp,
    Ormp,
    RankAware,
}

impl Common {
    fn config(&self) -> rtmwcs::error::Result<ExperimentConfig> {
        let base = ExperimentConfig::profile(self.profile);
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_toml_file_over(&base, path)?,
            None => base,
        };
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.snr {
            cfg.input_snr_db = v;
        }
        if self.max_bands.is_some() {
            cfg.max_bands = self.max_bands;
        }
        if let Some(v) = self.residual_tol {
            cfg.residual_tol = v;
        }
        if self.misaligned {
            cfg.mode = SamplingMode::Misaligned;
        }
        if let Some(v) = self.tau_jitter {
            cfg.tau_jitter = v;
        }
        if let Some(p) = self.pursuit {
            cfg.pursuit = match p {
                PursuitArg::Somp => Pursuit::Somp,
                PursuitArg::Ormp => Pursuit::Ormp,
                PursuitArg::RankAware => Pursuit::RankAware,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_sweep(table: &SweepTable, dir: &Path, name: &str, x_column: &str, x_label: &str) -> rtmwcs::error::Result<()> {
    fs::create_dir_all(dir)?;
    write_records(table, fs::File::create(dir.join(format!("{name}.csv")))?)?;
    let summary_path = dir.join(format!("{name}_summary.csv"));
    write_summary(table, fs::File::create(&summary_path)?)?;
    write_timing(table, fs::File::create(dir.join(format!("{name}_timing.csv")))?)?;
    let text = fs::read_to_string(&summary_path)?;
    if let Some(rows) = read_summary_series(&text, x_column) {
        let svg = line_chart(name, x_label, "output SNR (dB)", &series_from_rows(&rows));
        fs::write(dir.join(format!("{name}.svg")), svg)?;
    }
    println!("scheme,{x_column},trials,mean_snr_db,std_snr_db,exact_rate,feasible");
    for s in table.summaries() {
        let x = match x_column {
            "k" => s.k as f64,
            "m" => s.m as f64,
            _ => s.input_snr_db,
        };
        println!(
            "{},{},{},{:.2},{:.2},{:.2},{}",
            s.scheme.name(),
            x,
            s.trials,
            s.mean_snr_db,
            s.std_snr_db,
            s.exact_rate,
            s.feasible
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn run(cli: Cli) -> rtmwcs::error::Result<()> {
    let cfg = cli.common.config()?;
    let out = &cli.common.out_dir;
    match cli.command {
        Command::Simulate { signal } => {
            let report = simulate(&cfg, signal.as_deref(), out)?;
            let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
            println!("support: {}", join(&report.support));
            if !report.true_support.is_empty() {
                println!("true support: {}", join(&report.true_support));
            }
            println!("output snr: {:.2} dB", report.output_snr_db);
            println!("relative residual: {:.3e}", report.relative_residual);
            println!("wrote {}", out.display());
        }
        Command::SweepSparsity => write_sweep(&run_sparsity_sweep(&cfg)?, out, "sweep_sparsity", "k", "bands K")?,
        Command::SweepNoise => {
            write_sweep(&run_noise_sweep(&cfg)?, out, "sweep_noise", "input_snr_db", "input SNR (dB)")?
        }
        Command::SweepM => write_sweep(&run_m_sweep(&cfg, false)?, out, "sweep_m", "m", "acquisition runs M")?,
        Command::CompareMwc => write_sweep(&run_m_sweep(&cfg, true)?, out, "compare_mwc", "m", "runs or channels M")?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
