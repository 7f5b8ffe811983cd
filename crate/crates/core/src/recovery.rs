//! Blind reconstruction from `M` acquisitions.
//!
//! Each run contributes one row of `Z`, the phase-corrected DFT of its
//! sub-Nyquist samples, and every baseband bin satisfies `z(f) = Phi s(f)`.
//! The joint support of `s` is estimated by simultaneous OMP on a square-root
//! frame of `R = sum_f z(f) z(f)^H`; the slice spectra then follow from least
//! squares on that support.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::acquisition::{ideal_lowpass, Acquisition};
use crate::chipseq::MeasurementMatrix;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{bin_index, signed_bin, GridConfig};
use crate::signalgen::{snr_db, DEFAULT_EDGE_MARGIN};

/// Rank-aware scoring ignores residual directions below this fraction of `||V||_F`.
const RANK_FLOOR: f64 = 1e-2;
/// Rank-aware scoring ignores residual directions with power below this
/// multiple of the smallest covariance eigenvalue.
const NOISE_FLOOR_FACTOR: f64 = 4.0;
/// Once the support uses half the rows, a new group must remove this many
/// times its random share `|group| / (M - |S|)` of the residual energy.
const LATE_GAIN_FACTOR: f64 = 1.5;

/// Per-bin measurement vectors alongside the matrix that explains them.
#[derive(Debug, Clone)]
pub struct SpectralSystem {
    /// `M x P`, columns in length-`P` DFT storage order.
    pub z: DMatrix<Complex64>,
    pub phi: MeasurementMatrix,
    pub grid: GridConfig,
}

impl SpectralSystem {
    /// Baseband frequency of column `k`.
    pub fn bin_frequency(&self, k: usize) -> f64 {
        signed_bin(k, self.grid.n_periods()) as f64 * self.grid.fs() / self.grid.n_periods() as f64
    }

    /// Column holding the mirror frequency of column `k`.
    pub fn mirror_bin(&self, k: usize) -> usize {
        let p = self.grid.n_periods();
        (p - k) % p
    }
}

/// Estimated slice support, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportSet {
    pub indices: BTreeSet<usize>,
    /// Whether selection was done in mirror pairs `l <-> L + 1 - l`.
    pub symmetric: bool,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.indices.iter().copied().collect()
    }

    /// Space-separated indices, as written to CSV.
    pub fn to_field(&self) -> String {
        self.indices
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Column scoring rule used by the greedy support search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pursuit {
    /// `||phi_l^H Res||^2 / ||phi_l||^2` on the energy-weighted residual.
    Somp,
    /// As `Somp`, normalizing by the part of `phi_l` orthogonal to the
    /// selected columns.
    Ormp,
    /// Correlation with an orthonormal basis of the residual, normalized as
    /// in `Ormp`, after whitening the noise the chips fold into each run.
    #[default]
    RankAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryOptions {
    pub max_bands: usize,
    /// Stop once `||residual||_F <= residual_tol * ||V||_F`.
    pub residual_tol: f64,
    pub symmetric: bool,
    /// Eigenvalues below `eig_threshold * lambda_max` are dropped from the frame.
    pub eig_threshold: f64,
    pub edge_margin: f64,
    pub pursuit: Pursuit,
}

impl RecoveryOptions {
    pub fn new(max_bands: usize) -> Self {
        Self {
            max_bands,
            ..Self::default()
        }
    }
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            max_bands: 6,
            residual_tol: 1e-3,
            symmetric: true,
            eig_threshold: 1e-6,
            edge_margin: DEFAULT_EDGE_MARGIN,
            pursuit: Pursuit::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub support: SupportSet,
    /// `L x P` slice spectra, zero outside the support.
    pub s_hat: DMatrix<Complex64>,
    pub x_hat: Vec<f64>,
    pub output_snr_db: Option<f64>,
    /// `||Z - Phi S_hat||_F`.
    pub residual_norm: f64,
    /// `||Z||_F`, for normalizing the residual.
    pub z_norm: f64,
}

impl RecoveryResult {
    pub fn relative_residual(&self) -> f64 {
        if self.z_norm == 0.0 {
            0.0
        } else {
            self.residual_norm / self.z_norm
        }
    }
}

/// Row `m` of `Z` is the DFT of `y_m` times `e^{-j 2 pi f_j tau_m T}`.
pub fn build_spectral_system(
    acqs: &[Acquisition],
    phi: &MeasurementMatrix,
    grid: &GridConfig,
) -> Result<SpectralSystem> {
    if acqs.is_empty() {
        return Err(Error::NoAcquisitions);
    }
    if phi.m() != acqs.len() {
        return Err(Error::LengthMismatch {
            expected: acqs.len(),
            got: phi.m(),
        });
    }
    if phi.slices() != grid.slices() {
        return Err(Error::LengthMismatch {
            expected: grid.slices(),
            got: phi.slices(),
        });
    }
    let (p, n) = (grid.n_periods(), grid.len());
    let mut z = DMatrix::zeros(acqs.len(), p);
    for (row, acq) in acqs.iter().enumerate() {
        if acq.samples.len() != p {
            return Err(Error::LengthMismatch {
                expected: p,
                got: acq.samples.len(),
            });
        }
        let spec = fft::forward_real(&acq.samples);
        for (k, v) in spec.into_iter().enumerate() {
            let j = signed_bin(k, p) as f64;
            z[(row, k)] = v * Complex64::from_polar(1.0, -2.0 * PI * j * acq.tau as f64 / n as f64);
        }
    }
    Ok(SpectralSystem {
        z,
        phi: phi.clone(),
        grid: *grid,
    })
}

/// Time-domain route to `z_m[n]`: insert `L - 1` zeros between samples,
/// lowpass at `f_s/2` with gain `L`, then delay by `tau_m` ticks.
///
/// Its length-`N` DFT equals `L` times row `m` of [`build_spectral_system`]
/// on the baseband bins.
pub fn align_upsample(acq: &Acquisition, grid: &GridConfig) -> Vec<f64> {
    let (n, l) = (grid.len(), grid.slices());
    let mut stuffed = vec![0.0; n];
    for (k, &v) in acq.samples.iter().enumerate() {
        stuffed[k * l] = v * l as f64;
    }
    let smooth = ideal_lowpass(&stuffed, grid.fs() / 2.0, grid.f_nyq());
    let tau = acq.tau % n;
    (0..n).map(|i| smooth[(i + n - tau) % n]).collect()
}

/// `R = sum_j z(f_j) z(f_j)^H`.
pub fn covariance(sys: &SpectralSystem) -> DMatrix<Complex64> {
    &sys.z * sys.z.adjoint()
}

/// `R` from the time-domain sequences: `(P / L) sum_n z_i[n] z_k[n]^*`.
/// The factor is the DFT Parseval constant that puts it in the units of
/// [`covariance`].
pub fn covariance_time_domain(acqs: &[Acquisition], grid: &GridConfig) -> DMatrix<Complex64> {
    let seqs: Vec<Vec<f64>> = acqs.iter().map(|a| align_upsample(a, grid)).collect();
    let scale = grid.n_periods() as f64 / grid.slices() as f64;
    let m = seqs.len();
    let mut r = DMatrix::zeros(m, m);
    for i in 0..m {
        for k in i..m {
            let dot: f64 = seqs[i].iter().zip(&seqs[k]).map(|(a, b)| a * b).sum();
            r[(i, k)] = Complex64::new(scale * dot, 0.0);
            r[(k, i)] = r[(i, k)];
        }
    }
    r
}

/// `V = Q_r Lambda_r^{1/2}` over eigenpairs with `lambda >= threshold * lambda_max`.
pub fn frame(r: &DMatrix<Complex64>, threshold: f64) -> DMatrix<Complex64> {
    let m = r.nrows();
    if m == 0 {
        return DMatrix::zeros(0, 0);
    }
    let herm = (r + r.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if lambda_max <= 0.0 {
        return DMatrix::zeros(m, 0);
    }
    let mut order: Vec<usize> = (0..m)
        .filter(|&i| eig.eigenvalues[i] >= threshold * lambda_max && eig.eigenvalues[i] > 0.0)
        .collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    DMatrix::from_fn(m, order.len(), |row, col| {
        let i = order[col];
        eig.eigenvectors[(row, i)] * eig.eigenvalues[i].sqrt()
    })
}

fn smallest_eigenvalue(r: &DMatrix<Complex64>) -> f64 {
    let herm = (r + r.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// `(Phi Phi^H)^{-1/2}`, with near-null directions left unscaled.
fn whitener(phi: &MeasurementMatrix) -> DMatrix<Complex64> {
    let g = &phi.entries * phi.entries.adjoint();
    let herm = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let m = g.nrows();
    let mut w = DMatrix::zeros(m, m);
    for i in 0..m {
        let lambda = eig.eigenvalues[i];
        let scale = if lambda > 1e-12 * top { 1.0 / lambda.sqrt() } else { 0.0 };
        let q = eig.eigenvectors.column(i);
        w += q * q.adjoint() * Complex64::new(scale, 0.0);
    }
    w
}

fn frob(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the column space of `a`, dropping directions with
/// singular value at or below `floor`.
fn orthonormal_range(a: &DMatrix<Complex64>, floor: f64) -> DMatrix<Complex64> {
    if a.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > floor.max(1e-12 * smax))
        .collect();
    DMatrix::from_fn(a.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Least-squares coefficients of `rhs` on `cols`, rejecting rank deficiency.
fn least_squares(
    cols: &DMatrix<Complex64>,
    rhs: &DMatrix<Complex64>,
    support: &[usize],
) -> Result<DMatrix<Complex64>> {
    let svd = cols.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin <= 1e-10 * smax {
        return Err(Error::DegenerateSupport(support.to_vec()));
    }
    svd.solve(rhs, 0.0)
        .map_err(|_| Error::DegenerateSupport(support.to_vec()))
}

/// Greedy joint-sparse support search on the frame of `R`.
///
/// Each step scores every column with the rule of `opts.pursuit` (summed
/// over the mirror pair in symmetric mode), adds the best group, and
/// re-projects the frame onto the selected columns. Ties go to the lowest
/// index. The rank-aware rule runs on the system premultiplied by
/// `(Phi Phi^H)^{-1/2}`. The search stops when the residual falls under `residual_tol`,
/// the budget `max_bands` is spent, or, once half the rows are in use, a
/// group explains little more than a random one would.
pub fn somp_support(
    r: &DMatrix<Complex64>,
    phi: &MeasurementMatrix,
    opts: &RecoveryOptions,
) -> Result<SupportSet> {
    let m = phi.m();
    let l_count = phi.slices();
    if opts.max_bands > m {
        return Err(Error::TooManyBands {
            max_bands: opts.max_bands,
            m,
        });
    }
    let mut support = SupportSet {
        indices: BTreeSet::new(),
        symmetric: opts.symmetric,
    };
    // Slice-white noise reaches R shaped by Phi Phi^H; the rank-aware rule
    // works in coordinates where that noise is white.
    let (r, phi) = match opts.pursuit {
        Pursuit::RankAware => {
            let w = whitener(phi);
            let entries = &w * &phi.entries;
            (&w * r * w.adjoint(), MeasurementMatrix { entries })
        }
        _ => (r.clone(), phi.clone()),
    };
    let (r, phi) = (&r, &phi);
    let v = frame(r, opts.eig_threshold);
    let v_norm = frob(&v);
    if v.ncols() == 0 || v_norm == 0.0 {
        return Ok(support);
    }
    let col_norms: Vec<f64> = (0..l_count)
        .map(|c| phi.entries.column(c).iter().map(|x| x.norm_sqr()).sum::<f64>())
        .collect();
    let norm_floor = 1e-24 * col_norms.iter().copied().fold(0.0, f64::max);
    // Directions of the residual weaker than this are treated as noise by the
    // rank-aware score. The smallest eigenvalue of R estimates the noise power.
    let noise_floor = (NOISE_FLOOR_FACTOR * smallest_eigenvalue(r)).sqrt();
    let rank_floor = (RANK_FLOOR * v_norm).max(noise_floor);
    let mut residual = v.clone();
    // Orthonormal basis of the selected columns.
    let mut basis = DMatrix::<Complex64>::zeros(m, 0);

    loop {
        if frob(&residual) <= opts.residual_tol * v_norm || support.len() >= opts.max_bands {
            break;
        }
        let target = match opts.pursuit {
            Pursuit::RankAware => orthonormal_range(&residual, rank_floor),
            _ => residual.clone(),
        };
        let corr = phi.entries.adjoint() * &target;
        let proj = phi.entries.adjoint() * &basis;
        let score: Vec<f64> = (0..l_count)
            .map(|c| {
                let norm = match opts.pursuit {
                    Pursuit::Somp => col_norms[c],
                    _ => col_norms[c] - proj.row(c).iter().map(|x| x.norm_sqr()).sum::<f64>(),
                };
                if norm <= norm_floor.max(1e-12 * col_norms[c]) {
                    0.0
                } else {
                    corr.row(c).iter().map(|x| x.norm_sqr()).sum::<f64>() / norm
                }
            })
            .collect();
        let budget = opts.max_bands - support.len();
        let mut best: Option<(f64, Vec<usize>)> = None;
        for l in 1..=l_count {
            if support.indices.contains(&l) {
                continue;
            }
            let group = if opts.symmetric {
                let mirror = l_count + 1 - l;
                if mirror < l {
                    continue;
                }
                if mirror == l { vec![l] } else { vec![l, mirror] }
            } else {
                vec![l]
            };
            if group.len() > budget {
                continue;
            }
            let s: f64 = group.iter().map(|&g| score[g - 1]).sum();
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, group));
            }
        }
        let Some((s, group)) = best else { break };
        if s <= 1e-24 {
            break;
        }
        let before = frob(&residual).powi(2);
        let free_dims = m.saturating_sub(support.len()) as f64;
        let mut trial = support.clone();
        trial.indices.extend(group.iter().copied());
        let idx = trial.to_vec();
        let cols = phi.columns(&idx);
        let coef = least_squares(&cols, &v, &idx)?;
        let next = &v - &cols * coef;
        // Past half the rows, a group must explain clearly more than the
        // share of the residual a random group would absorb.
        let gain = (before - frob(&next).powi(2)) / before;
        if 2 * support.len() >= m && gain < LATE_GAIN_FACTOR * group.len() as f64 / free_dims {
            break;
        }
        support = trial;
        residual = next;
        basis = orthonormal_range(&cols, 0.0);
    }
    Ok(support)
}

/// Per-bin least squares `s_S(f_j) = pinv(Phi_S) z(f_j)`, zero off support.
pub fn recover_slices(sys: &SpectralSystem, support: &SupportSet) -> Result<DMatrix<Complex64>> {
    let (l_count, p) = (sys.grid.slices(), sys.grid.n_periods());
    let mut s_hat = DMatrix::zeros(l_count, p);
    if support.is_empty() {
        return Ok(s_hat);
    }
    if support.len() > sys.phi.m() {
        return Err(Error::TooManyBands {
            max_bands: support.len(),
            m: sys.phi.m(),
        });
    }
    let idx = support.to_vec();
    let cols = sys.phi.columns(&idx);
    let coef = least_squares(&cols, &sys.z, &idx)?;
    for (row, &l) in idx.iter().enumerate() {
        s_hat.set_row(l - 1, &coef.row(row));
    }
    Ok(s_hat)
}

/// Places slice `l` at offset `(l - L_0 - 1) f_p` on the length-`N` grid and
/// inverts; the real part enforces conjugate symmetry.
pub fn reconstruct_time(s_hat: &DMatrix<Complex64>, grid: &GridConfig) -> Vec<f64> {
    let (l_count, p, n) = (grid.slices(), grid.n_periods(), grid.len());
    let l0 = grid.half_slices() as i64;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for row in 0..l_count {
        let offset = (row as i64 - l0) * p as i64;
        for col in 0..p {
            let bin = offset + signed_bin(col, p);
            spectrum[bin_index(bin, n)] = s_hat[(row, col)] * l_count as f64;
        }
    }
    fft::inverse_real(&spectrum)
}

/// Support estimation, least squares and inversion in one call.
pub fn reconstruct(
    acqs: &[Acquisition],
    phi: &MeasurementMatrix,
    grid: &GridConfig,
    opts: &RecoveryOptions,
    reference: Option<&[f64]>,
) -> Result<RecoveryResult> {
    let sys = build_spectral_system(acqs, phi, grid)?;
    let r = covariance(&sys);
    let support = somp_support(&r, phi, opts)?;
    let s_hat = recover_slices(&sys, &support)?;
    let fitted = &sys.phi.entries * &s_hat;
    let residual_norm = frob(&(&sys.z - fitted));
    let x_hat = reconstruct_time(&s_hat, grid);
    let output_snr_db = reference
        .map(|r| snr_db(r, &x_hat, opts.edge_margin))
        .transpose()?;
    Ok(RecoveryResult {
        support,
        s_hat,
        x_hat,
        output_snr_db,
        residual_norm,
        z_norm: frob(&sys.z),
    })
}
