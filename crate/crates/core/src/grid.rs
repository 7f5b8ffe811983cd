use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rate and size parameters shared by every stage of the pipeline.
///
/// The record lives on the Nyquist grid `t = n / f_nyq`, `n = 0..N`, with
/// `N = L * n_periods`. One chip period `T_p` spans `L` Nyquist ticks, and the
/// sub-Nyquist ADC runs at `f_s = f_p = f_nyq / L`, so every acquisition
/// yields `n_periods` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    f_nyq: f64,
    slices: usize,
    n_periods: usize,
}

impl GridConfig {
    pub fn new(f_nyq: f64, slices: usize, n_periods: usize) -> Result<Self> {
        if !(f_nyq.is_finite() && f_nyq > 0.0) {
            return Err(Error::InvalidGrid(format!("f_nyq must be positive, got {f_nyq}")));
        }
        if slices == 0 || slices.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "slice count L must be odd and >= 1, got {slices}"
            )));
        }
        if n_periods == 0 {
            return Err(Error::InvalidGrid("n_periods must be >= 1".into()));
        }
        Ok(Self {
            f_nyq,
            slices,
            n_periods,
        })
    }

    /// Nyquist rate in Hz.
    pub fn f_nyq(&self) -> f64 {
        self.f_nyq
    }

    /// `L`, the number of spectral slices (and chips per period).
    pub fn slices(&self) -> usize {
        self.slices
    }

    /// `L_0 = (L - 1) / 2`.
    pub fn half_slices(&self) -> usize {
        (self.slices - 1) / 2
    }

    /// Chip periods in the record; also the sub-Nyquist samples per acquisition.
    pub fn n_periods(&self) -> usize {
        self.n_periods
    }

    /// Nyquist-grid record length `N`.
    pub fn len(&self) -> usize {
        self.slices * self.n_periods
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Nyquist sampling period `T`.
    pub fn period(&self) -> f64 {
        1.0 / self.f_nyq
    }

    /// ADC rate `f_s`.
    pub fn fs(&self) -> f64 {
        self.f_nyq / self.slices as f64
    }

    /// Chip repetition rate `f_p`, equal to `f_s`.
    pub fn fp(&self) -> f64 {
        self.fs()
    }

    /// ADC period `T_s = L * T`.
    pub fn ts(&self) -> f64 {
        self.slices as f64 / self.f_nyq
    }

    /// Chip period `T_p`, equal to `T_s`.
    pub fn tp(&self) -> f64 {
        self.ts()
    }

    /// Record duration `N * T`.
    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.f_nyq
    }

    /// Bin spacing of the length-`N` DFT, `f_nyq / N`.
    pub fn bin_hz(&self) -> f64 {
        self.f_nyq / self.len() as f64
    }

    /// Center frequency of slice `l` (1-based): `(l - L_0 - 1) * f_p`.
    pub fn slice_center(&self, l: usize) -> f64 {
        (l as f64 - self.half_slices() as f64 - 1.0) * self.fp()
    }

    /// Slice index (1-based) holding signed Nyquist-grid bin `bin`.
    ///
    /// Slice `l` owns the `n_periods` bins `(l - L_0 - 1) * P + j` with
    /// `j` in `[-floor(P/2), P - floor(P/2))`.
    pub fn slice_of_bin(&self, bin: i64) -> usize {
        let p = self.n_periods as i64;
        let shifted = (bin + p / 2).div_euclid(p);
        (shifted + self.half_slices() as i64 + 1) as usize
    }
}

/// Signed frequency index of DFT bin `k` in a length-`n` transform, taken in
/// `[-floor(n/2), n - floor(n/2))`.
pub fn signed_bin(k: usize, n: usize) -> i64 {
    let half = (n / 2) as i64;
    let k = k as i64;
    let n = n as i64;
    if k < n - half {
        k
    } else {
        k - n
    }
}

/// DFT storage index of signed bin `bin` in a length-`n` transform.
pub fn bin_index(bin: i64, n: usize) -> usize {
    bin.rem_euclid(n as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_rates() {
        let g = GridConfig::new(2.5e9, 197, 513).unwrap();
        assert_eq!(g.half_slices(), 98);
        assert_eq!(g.len(), 197 * 513);
        assert!((g.fs() - 12.690355329949238e6).abs() < 1e-3);
        assert!((g.fs() * g.slices() as f64 - g.f_nyq()).abs() < 1e-3);
        assert_eq!(g.fs(), g.fp());
        assert!((g.ts() * g.fs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_even_or_zero_slices() {
        assert!(GridConfig::new(1.0, 0, 4).is_err());
        assert!(GridConfig::new(1.0, 4, 4).is_err());
        assert!(GridConfig::new(1.0, 5, 0).is_err());
        assert!(GridConfig::new(-1.0, 5, 4).is_err());
        assert!(GridConfig::new(1.0, 1, 1).is_ok());
    }

    #[test]
    fn slices_partition_the_bins() {
        for (l, p) in [(5usize, 4usize), (5, 5), (17, 9), (1, 6)] {
            let g = GridConfig::new(1.0, l, p).unwrap();
            let n = g.len();
            let mut counts = vec![0usize; l + 1];
            for k in 0..n {
                let s = g.slice_of_bin(signed_bin(k, n));
                assert!((1..=l).contains(&s), "bin {k} -> slice {s}");
                counts[s] += 1;
            }
            assert!(counts[1..].iter().all(|&c| c == p));
        }
    }

    #[test]
    fn signed_bin_roundtrip() {
        for n in [1usize, 2, 7, 8] {
            for k in 0..n {
                assert_eq!(bin_index(signed_bin(k, n), n), k);
            }
        }
        assert_eq!(signed_bin(4, 8), -4);
        assert_eq!(signed_bin(3, 7), 3);
        assert_eq!(signed_bin(4, 7), -3);
    }
}
