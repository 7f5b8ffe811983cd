//! Pseudorandom +-1 chip sequences and the measurement matrix they induce.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridConfig;

/// `M` chip rows of length `L`, entries exactly +1 or -1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipSet {
    pub grid: GridConfig,
    chips: Vec<Vec<i8>>,
    pub seed: u64,
}

impl ChipSet {
    pub fn from_rows(grid: GridConfig, rows: Vec<Vec<i8>>, seed: u64) -> Result<Self> {
        for row in &rows {
            check_row(row, grid.slices())?;
        }
        Ok(Self {
            grid,
            chips: rows,
            seed,
        })
    }

    /// Number of rows `M`.
    pub fn m(&self) -> usize {
        self.chips.len()
    }

    pub fn row(&self, m: usize) -> &[i8] {
        &self.chips[m]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.chips
    }

    /// The first `m` rows.
    pub fn truncated(&self, m: usize) -> ChipSet {
        ChipSet {
            grid: self.grid,
            chips: self.chips[..m.min(self.chips.len())].to_vec(),
            seed: self.seed,
        }
    }

    /// Whitespace-separated text, one row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.chips {
            let line: Vec<&str> = row.iter().map(|&a| if a > 0 { "+1" } else { "-1" }).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse_text(grid: GridConfig, text: &str, path: &Path) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg,
            };
            let row = line
                .split_whitespace()
                .map(|tok| match tok {
                    "1" | "+1" => Ok(1i8),
                    "-1" => Ok(-1i8),
                    other => Err(parse_err(format!("chip value {other:?} is not +1/-1"))),
                })
                .collect::<Result<Vec<i8>>>()?;
            if row.len() != grid.slices() {
                return Err(parse_err(format!(
                    "expected {} chips, found {}",
                    grid.slices(),
                    row.len()
                )));
            }
            rows.push(row);
        }
        Self::from_rows(grid, rows, 0)
    }
}

fn check_row(row: &[i8], l: usize) -> Result<()> {
    if row.len() != l || row.iter().any(|&a| a != 1 && a != -1) {
        return Err(Error::InvalidChips { expected: l });
    }
    Ok(())
}

/// Draws `m` i.i.d. symmetric Bernoulli rows. Rows come off one seeded
/// stream in order, so the first `k` rows do not depend on `m`.
pub fn generate_chips(grid: GridConfig, m: usize, seed: u64) -> ChipSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chips = (0..m)
        .map(|_| {
            (0..grid.slices())
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect()
        })
        .collect();
    ChipSet { grid, chips, seed }
}

/// Fourier-series coefficients `c_q`, `q = -L_0..=L_0` (stored at `q + L_0`),
/// of the period-`T_p` waveform that holds `row[k]` on `[k T_p/L, (k+1) T_p/L)`.
///
/// Integrating chip by chip gives
/// `c_q = (1 - e^{-j 2 pi q / L}) / (j 2 pi q) * sum_k row[k] e^{-j 2 pi q k / L}`
/// and `c_0 = mean(row)`.
pub fn fourier_coeffs(row: &[i8]) -> Vec<Complex64> {
    let l = row.len();
    let l0 = (l as i64 - 1) / 2;
    (-l0..=l0)
        .map(|q| {
            if q == 0 {
                let sum: f64 = row.iter().map(|&a| a as f64).sum();
                return Complex64::new(sum / l as f64, 0.0);
            }
            let w = -2.0 * PI * q as f64 / l as f64;
            let dft: Complex64 = row
                .iter()
                .enumerate()
                .map(|(k, &a)| Complex64::from_polar(a as f64, w * k as f64))
                .sum();
            let hold = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, w))
                / Complex64::new(0.0, 2.0 * PI * q as f64);
            hold * dft
        })
        .collect()
}

/// One period (`L` Nyquist ticks) of the chip waveform restricted to the
/// harmonics `|q| <= L_0`, i.e. the part of the +-1 waveform that can reach
/// the baseband after the `f_s/2` lowpass.
pub fn in_band_waveform(row: &[i8]) -> Vec<f64> {
    let l = row.len();
    let l0 = (l as i64 - 1) / 2;
    let coeffs = fourier_coeffs(row);
    (0..l)
        .map(|n| {
            (-l0..=l0)
                .zip(&coeffs)
                .map(|(q, c)| (c * Complex64::from_polar(1.0, 2.0 * PI * (q * n as i64) as f64 / l as f64)).re)
                .sum()
        })
        .collect()
}

/// `Phi` (`M x L`): row `m`, column `l` (1-based) holds `c_{m, L_0 + 1 - l}`,
/// pairing slice `l` (offset `(l - L_0 - 1) f_p`) with the harmonic that
/// shifts it down to baseband.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    pub entries: DMatrix<Complex64>,
}

impl MeasurementMatrix {
    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn slices(&self) -> usize {
        self.entries.ncols()
    }

    /// Columns listed in `support` (1-based) as an `M x |support|` matrix.
    pub fn columns(&self, support: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.m(), support.len(), |r, c| self.entries[(r, support[c] - 1)])
    }

    /// The first `m` rows.
    pub fn truncated(&self, m: usize) -> MeasurementMatrix {
        MeasurementMatrix {
            entries: self.entries.rows(0, m.min(self.m())).into_owned(),
        }
    }
}

pub fn build_phi(chipset: &ChipSet) -> MeasurementMatrix {
    let l = chipset.grid.slices();
    let mut entries = DMatrix::zeros(chipset.m(), l);
    for (m, row) in chipset.rows().iter().enumerate() {
        let coeffs = fourier_coeffs(row);
        for col in 0..l {
            // column l = col + 1 takes harmonic q = L_0 - col, stored at 2 L_0 - col
            entries[(m, col)] = coeffs[l - 1 - col];
        }
    }
    MeasurementMatrix { entries }
}
