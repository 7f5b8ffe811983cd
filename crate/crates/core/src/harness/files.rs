//! Waveform text files, raw binary vectors and per-run tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use crate::acquisition::Acquisition;
use crate::error::{Error, Result};
use crate::harness::csv::fmt_f64;

/// Real samples at the Nyquist rate, as stored in a waveform file.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub f_nyq: f64,
    pub samples: Vec<f64>,
}

impl Waveform {
    /// Header `f_nyq_hz=<v> n=<count>`, then one sample per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 25 + 64);
        let _ = writeln!(out, "f_nyq_hz={} n={}", fmt_f64(self.f_nyq), self.samples.len());
        for v in &self.samples {
            let _ = writeln!(out, "{}", fmt_f64(*v));
        }
        out
    }

    /// Parses waveform text. Errors name the offending line of `path`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file, expected header".into()))?;
        let mut f_nyq = None;
        let mut n = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("f_nyq_hz", v)) => {
                    f_nyq = Some(v.parse::<f64>().map_err(|e| err(1, format!("bad f_nyq_hz {v:?}: {e}")))?)
                }
                Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|e| err(1, format!("bad n {v:?}: {e}")))?),
                _ => return Err(err(1, format!("unexpected header token {tok:?}"))),
            }
        }
        let f_nyq = f_nyq.ok_or_else(|| err(1, "header lacks f_nyq_hz=".into()))?;
        let n = n.ok_or_else(|| err(1, "header lacks n=".into()))?;
        if !(f_nyq.is_finite() && f_nyq > 0.0) {
            return Err(err(1, format!("f_nyq_hz must be positive, got {f_nyq}")));
        }
        if n == 0 {
            return Err(err(1, "zero-length signal".into()));
        }
        let mut samples = Vec::with_capacity(n);
        for (i, line) in lines {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if samples.len() == n {
                return Err(err(i + 1, format!("more than the declared {n} samples")));
            }
            let v: f64 = t.parse().map_err(|e| err(i + 1, format!("bad sample {t:?}: {e}")))?;
            if !v.is_finite() {
                return Err(err(i + 1, format!("non-finite sample {t:?}")));
            }
            samples.push(v);
        }
        if samples.len() != n {
            return Err(err(
                text.lines().count(),
                format!("declared {n} samples, found {}", samples.len()),
            ));
        }
        Ok(Self { f_nyq, samples })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(Error::file(path))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Little-endian `f64` values, no header.
pub fn write_f64_le(path: &Path, values: &[f64]) -> Result<()> {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_f64_le(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(Error::file(path))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::LengthMismatch {
            expected: bytes.len() / 8 * 8,
            got: bytes.len(),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

/// Rows `rows` of `m` as interleaved little-endian `(re, im)` pairs, row-major.
pub fn write_rows_c64_le(path: &Path, m: &DMatrix<Complex64>, rows: &[usize]) -> Result<()> {
    let mut bytes = Vec::with_capacity(rows.len() * m.ncols() * 16);
    for &r in rows {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub const RUNS_HEADER: &str = "run,dt_s,tau,chips";

/// One row per acquisition: run index, true offset, reported ticks, chip row.
pub fn runs_csv(acqs: &[Acquisition]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{RUNS_HEADER}");
    for a in acqs {
        let chips: String = a.chips_row.iter().map(|&c| if c > 0 { '+' } else { '-' }).collect();
        let _ = writeln!(out, "{},{},{},{}", a.m, fmt_f64(a.dt), a.tau, chips);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("sig.txt")
    }

    #[test]
    fn waveform_round_trips_bitwise() {
        let w = Waveform {
            f_nyq: 2.5e9,
            samples: vec![0.1, -1.0 / 3.0, 1e-300, 0.0, 7.25],
        };
        let back = Waveform::parse(&w.to_text(), p()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn malformed_files_report_lines() {
        let cases = [
            ("", 1),
            ("f_nyq_hz=1e9 n=0\n", 1),
            ("f_nyq_hz=1e9\n1\n", 1),
            ("f_nyq_hz=1e9 n=2 x=1\n", 1),
            ("f_nyq_hz=1e9 n=3\n1\n2\nabc\n", 4),
            ("f_nyq_hz=1e9 n=2\n1\n2\n3\n", 4),
            ("f_nyq_hz=1e9 n=3\n1\n2\n", 3),
            ("f_nyq_hz=1e9 n=1\nNaN\n", 2),
        ];
        for (text, line) in cases {
            match Waveform::parse(text, p()) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.f64");
        let v = vec![1.5, -2.0, f64::MIN_POSITIVE];
        write_f64_le(&path, &v).unwrap();
        assert_eq!(fs::metadata(&path).unwrap().len(), 24);
        assert_eq!(read_f64_le(&path).unwrap(), v);
    }

    #[test]
    fn runs_table() {
        let a = Acquisition {
            m: 2,
            samples: vec![],
            dt: 0.5,
            tau: 3,
            chips_row: vec![1, -1, 1],
        };
        assert_eq!(runs_csv(&[a]), format!("{RUNS_HEADER}\n2,5.0000000000000000e-1,3,+-+\n"));
    }
}
