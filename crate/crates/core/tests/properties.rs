use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rtmwcs::acquisition::{acquire_with_offsets, draw_offsets, quantize_offset, SamplingMode};
use rtmwcs::chipseq::{build_phi, fourier_coeffs, generate_chips, ChipSet};
use rtmwcs::grid::GridConfig;
use rtmwcs::harness::csv::fmt_f64;
use rtmwcs::harness::files::Waveform;
use rtmwcs::harness::SweepRange;
use rtmwcs::recovery::{reconstruct, reconstruct_time, RecoveryOptions};
use rtmwcs::signalgen::{generate_multiband, slice_spectra, snr_db, BandSpec, MultibandSignal};

fn small_grid() -> GridConfig {
    GridConfig::new(250e6, 17, 33).unwrap()
}

fn chip_row(l: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), l)
}

fn odd_slices() -> impl Strategy<Value = usize> {
    (1usize..40).prop_map(|h| 2 * h + 1)
}

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chip_coefficients_are_conjugate_symmetric_and_bounded(row in odd_slices().prop_flat_map(chip_row)) {
        let c = fourier_coeffs(&row);
        let l0 = c.len() / 2;
        for q in 1..=l0 {
            prop_assert!((c[l0 + q] - c[l0 - q].conj()).norm() <= 1e-12);
        }
        let energy: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        prop_assert!(energy <= 1.0 + 1e-12);
    }

    #[test]
    fn stacked_chips_stack_the_matrix(seed_a in any::<u64>(), seed_b in any::<u64>(), ma in 1usize..6, mb in 1usize..6) {
        let grid = small_grid();
        let a = generate_chips(grid, ma, seed_a);
        let b = generate_chips(grid, mb, seed_b);
        let rows: Vec<Vec<i8>> = a.rows().iter().chain(b.rows()).cloned().collect();
        let both = ChipSet::from_rows(grid, rows, 0).unwrap();
        let (pa, pb, pab) = (build_phi(&a), build_phi(&b), build_phi(&both));
        prop_assert_eq!(pab.m(), ma + mb);
        for c in 0..grid.slices() {
            for r in 0..ma {
                prop_assert_eq!(pab.entries[(r, c)], pa.entries[(r, c)]);
            }
            for r in 0..mb {
                prop_assert_eq!(pab.entries[(ma + r, c)], pb.entries[(r, c)]);
            }
        }
    }

    #[test]
    fn chip_prefixes_do_not_depend_on_the_count(seed in any::<u64>(), m in 1usize..12) {
        let grid = small_grid();
        let long = generate_chips(grid, 12, seed);
        let short = generate_chips(grid, m, seed);
        prop_assert_eq!(short.rows(), &long.rows()[..m]);
    }

    #[test]
    fn offsets_quantize_inside_one_sampling_period(seed in any::<u64>(), m in 1usize..30, l in odd_slices()) {
        let grid = GridConfig::new(1e9, l, 9).unwrap();
        for (dt, jitter) in draw_offsets(&grid, m, seed, 0) {
            prop_assert_eq!(jitter, 0);
            prop_assert!(dt >= 0.0 && dt < grid.ts());
            let tau = quantize_offset(dt, &grid).unwrap();
            prop_assert!(tau < l);
            prop_assert!(tau as f64 >= dt * grid.f_nyq() - 1e-9);
        }
    }

    #[test]
    fn jitter_stays_within_its_bound(seed in any::<u64>(), jitter in 1u32..4) {
        let grid = small_grid();
        for (_, j) in draw_offsets(&grid, 20, seed, jitter) {
            prop_assert!(j.unsigned_abs() <= u64::from(jitter));
        }
    }

    #[test]
    fn slices_reassemble_any_record(x in samples(17 * 33)) {
        let grid = small_grid();
        let back = reconstruct_time(&slice_spectra(&x, &grid), &grid);
        let scale: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn acquisition_is_linear(x in samples(17 * 33), y in samples(17 * 33), a in -3.0f64..3.0, seed in any::<u64>()) {
        let grid = small_grid();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + v).collect();
        let chips = generate_chips(grid, 3, seed);
        let offsets = draw_offsets(&grid, 3, seed ^ 1, 0);
        let run = |s: Vec<f64>| {
            let sig = MultibandSignal::from_samples(grid, s).unwrap();
            acquire_with_offsets(&sig, &chips, &offsets, SamplingMode::Misaligned).unwrap()
        };
        let (ax, ay, asum) = (run(x), run(y), run(sum));
        for m in 0..3 {
            for k in 0..33 {
                let lin = a * ax[m].samples[k] + ay[m].samples[k];
                prop_assert!((lin - asum[m].samples[k]).abs() <= 1e-9 * (1.0 + lin.abs()));
            }
        }
    }

    #[test]
    fn seventeen_digits_round_trip(v in any::<f64>()) {
        let text = fmt_f64(v);
        if v.is_nan() {
            prop_assert_eq!(text, "NaN");
        } else {
            prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn waveform_text_round_trips(x in prop::collection::vec(-1e6f64..1e6, 1..200), f_nyq in 1e3f64..1e10) {
        let w = Waveform { f_nyq, samples: x };
        prop_assert_eq!(Waveform::parse(&w.to_text(), Path::new("w.txt")).unwrap(), w);
    }

    #[test]
    fn snr_ignores_common_scaling(x in samples(64), noise in samples(64), g in 0.01f64..100.0) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let est: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a + 0.1 * b).collect();
        let scaled_x: Vec<f64> = x.iter().map(|v| g * v).collect();
        let scaled_est: Vec<f64> = est.iter().map(|v| g * v).collect();
        let a = snr_db(&x, &est, 0.0).unwrap();
        let b = snr_db(&scaled_x, &scaled_est, 0.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn sweep_ranges_are_inclusive(start in 0i32..20, len in 0i32..20, step in 1i32..4) {
        let stop = start + len;
        let r = SweepRange::new(start as f64, stop as f64, step as f64);
        let v = r.values();
        prop_assert_eq!(v.len() as i32, len / step + 1);
        prop_assert_eq!(v[0], start as f64);
        prop_assert!(*v.last().unwrap() <= stop as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn symmetric_support_is_closed_under_mirroring(
        seed in any::<u64>(),
        carrier in 20e6f64..100e6,
        t in 0.3f64..0.7,
        max_bands in 2usize..8,
    ) {
        let grid = small_grid();
        let bands = [BandSpec::new(3.0, 4e6, t * grid.duration(), carrier)];
        let sig = generate_multiband(grid, &bands).unwrap();
        let chips = generate_chips(grid, 10, seed);
        let acqs = acquire_with_offsets(&sig, &chips, &draw_offsets(&grid, 10, seed ^ 7, 0), SamplingMode::Exact).unwrap();
        let res = reconstruct(&acqs, &build_phi(&chips), &grid, &RecoveryOptions::new(max_bands), None).unwrap();
        prop_assert!(res.support.len() <= max_bands);
        let mirrored: BTreeSet<usize> = res.support.indices.iter().map(|&l| 18 - l).collect();
        prop_assert_eq!(&mirrored, &res.support.indices);
    }

    #[test]
    fn slice_spectra_are_linear(x in samples(17 * 33), y in samples(17 * 33), a in -3.0f64..3.0) {
        let grid = small_grid();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + v).collect();
        let (sx, sy, ss) = (slice_spectra(&x, &grid), slice_spectra(&y, &grid), slice_spectra(&sum, &grid));
        let lin: DMatrix<_> = sx * rustfft::num_complex::Complex64::new(a, 0.0) + sy;
        let scale = ss.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1.0);
        prop_assert!((lin - ss).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() <= 1e-9 * scale);
    }
}
