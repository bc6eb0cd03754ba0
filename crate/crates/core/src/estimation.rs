//! Snapshot synthesis, MUSIC DoA estimation, and Monte Carlo studies.
//!
//! The received snapshots follow the rank-1 model: every column is the
//! movable-sensor steering vector scaled by the propagation/beamforming
//! chain and a unit-power symbol, plus circular complex Gaussian noise.
//! MUSIC runs either directly on the physical (generally non-uniform) array
//! or on a uniform virtual array obtained by sector-fitted least-squares
//! interpolation of the sample covariance, which suppresses the sidelobes
//! the non-uniform geometry produces.

use crate::array_geometry::SensorLayout;
use crate::channel::{
    channel_gains, ms_steering, optimal_beamformer, optimal_phase_shifts, scalar_chain,
    SystemConfig,
};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How the small-scale fading factor is treated during synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Beta0Mode {
    /// `β₀ = 1`, so Monte Carlo curves align with the deterministic CRB.
    FixedUnit,
    /// `β₀` drawn once per snapshot set from CN(0, 1).
    Sampled,
}

/// A block of received snapshots with its generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    /// K x T received matrix.
    pub data: DMatrix<Complex64>,
    pub seed: u64,
    pub beta0_mode: Beta0Mode,
    /// True DoA in radians.
    pub true_theta: f64,
}

/// Uniform angle grid in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
}

impl AngleGrid {
    pub fn new(start_deg: f64, stop_deg: f64, step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0) || stop_deg <= start_deg {
            return Err(Error::Domain(format!(
                "invalid angle grid [{start_deg}, {stop_deg}] step {step_deg}"
            )));
        }
        Ok(Self { start_deg, stop_deg, step_deg })
    }

    pub fn angles(&self) -> Vec<f64> {
        let n = ((self.stop_deg - self.start_deg) / self.step_deg).round() as usize;
        (0..=n).map(|i| self.start_deg + i as f64 * self.step_deg).collect()
    }
}

/// Spectrum normalization state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Linear,
    PeakNormalizedDb,
}

/// Angle-indexed pseudo-spectrum with peak metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub angles_deg: Vec<f64>,
    pub values: Vec<f64>,
    pub peak_angle_deg: f64,
    pub peak_value: f64,
    pub normalization: Normalization,
}

impl Spectrum {
    /// Converts a linear spectrum to dB normalized to a 0 dB peak.
    pub fn to_peak_normalized_db(&self) -> Spectrum {
        let peak = self.peak_value.max(1e-300);
        let values: Vec<f64> = self.values.iter().map(|v| 10.0 * (v / peak).log10()).collect();
        Spectrum {
            angles_deg: self.angles_deg.clone(),
            values,
            peak_angle_deg: self.peak_angle_deg,
            peak_value: 0.0,
            normalization: Normalization::PeakNormalizedDb,
        }
    }

    /// Main-lobe width at `drop_db` below the peak, by linear interpolation
    /// of the crossings on both sides of the peak. Requires dB values.
    pub fn lobe_width_deg(&self, drop_db: f64) -> Result<f64> {
        if self.normalization != Normalization::PeakNormalizedDb {
            return Err(Error::Domain("lobe width requires a peak-normalized dB spectrum".into()));
        }
        let threshold = -drop_db.abs();
        let peak_idx = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Ambiguity("empty spectrum".into()))?;

        let cross = |mut i: usize, step: isize| -> Option<f64> {
            loop {
                let j = i as isize + step;
                if j < 0 || j as usize >= self.values.len() {
                    return None;
                }
                let j = j as usize;
                if self.values[j] <= threshold {
                    let frac =
                        (self.values[i] - threshold) / (self.values[i] - self.values[j]);
                    return Some(
                        self.angles_deg[i] + frac * (self.angles_deg[j] - self.angles_deg[i]),
                    );
                }
                i = j;
            }
        };
        match (cross(peak_idx, -1), cross(peak_idx, 1)) {
            (Some(lo), Some(hi)) => Ok(hi - lo),
            _ => Err(Error::Ambiguity("main lobe does not drop below threshold on the grid".into())),
        }
    }
}

fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Synthesizes `T` received snapshots under the optimal beamformer and
/// phase profile. Deterministic for a given seed.
pub fn synthesize_snapshots(
    config: &SystemConfig,
    layout: &SensorLayout,
    seed: u64,
    beta0_mode: Beta0Mode,
) -> Result<SnapshotSet> {
    config.validate()?;
    layout.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let beta_0 = match beta0_mode {
        Beta0Mode::FixedUnit => Complex64::new(1.0, 0.0),
        Beta0Mode::Sampled => complex_gaussian(&mut rng, 1.0),
    };
    let gains = channel_gains(config, beta_0)?;
    let w = optimal_beamformer(config)?;
    let phases = optimal_phase_shifts(config)?;
    let chain = scalar_chain(config, &phases, &w)?;
    let gain = gains.beta_bi * gains.beta_0 * gains.beta_1 * chain;
    let b = ms_steering(&layout.positions, config.theta, config.wavelength)?;

    let k = layout.positions.len();
    let t = config.snapshots;
    let mut data = DMatrix::<Complex64>::zeros(k, t);
    for col in 0..t {
        // Unit-modulus random-phase symbol.
        let symbol = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        for row in 0..k {
            data[(row, col)] =
                gain * b[row] * symbol + complex_gaussian(&mut rng, config.noise_power);
        }
    }
    Ok(SnapshotSet { data, seed, beta0_mode, true_theta: config.theta })
}

/// Sample covariance `(1/T) Y Yᴴ`.
pub fn sample_covariance(snapshots: &SnapshotSet) -> DMatrix<Complex64> {
    let t = snapshots.data.ncols() as f64;
    let y = &snapshots.data;
    (y * y.adjoint()) / Complex64::new(t, 0.0)
}

fn check_hermitian(r: &DMatrix<Complex64>) -> Result<()> {
    let norm = r.norm().max(1e-300);
    if (r - r.adjoint()).norm() > 1e-8 * norm {
        return Err(Error::Domain("covariance is not Hermitian".into()));
    }
    Ok(())
}

/// Noise-subspace projector `E_n E_nᴴ` from the sample covariance.
fn noise_projector(
    covariance: &DMatrix<Complex64>,
    source_count: usize,
) -> Result<DMatrix<Complex64>> {
    let k = covariance.nrows();
    if source_count >= k {
        return Err(Error::Domain(format!(
            "source count {source_count} must be below sensor count {k}"
        )));
    }
    check_hermitian(covariance)?;
    let eig = nalgebra::SymmetricEigen::new(covariance.clone());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let noise_dim = k - source_count;
    let mut projector = DMatrix::<Complex64>::zeros(k, k);
    for &idx in order.iter().take(noise_dim) {
        let v = eig.eigenvectors.column(idx);
        for i in 0..k {
            for j in 0..k {
                projector[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    Ok(projector)
}

/// MUSIC pseudo-spectrum `P(θ) = 1 / (bᴴ(θ) E_n E_nᴴ b(θ))` over the grid.
///
/// `positions` selects the steering model: the physical sensor coordinates
/// or the uniform virtual-array coordinates.
pub fn music_spectrum(
    covariance: &DMatrix<Complex64>,
    positions: &[f64],
    wavelength: f64,
    grid: &AngleGrid,
    source_count: usize,
) -> Result<Spectrum> {
    if positions.len() != covariance.nrows() {
        return Err(Error::Domain(format!(
            "covariance is {}x{} but steering model has {} elements",
            covariance.nrows(),
            covariance.ncols(),
            positions.len()
        )));
    }
    let projector = noise_projector(covariance, source_count)?;
    let angles = grid.angles();
    let mut values = Vec::with_capacity(angles.len());
    for &deg in &angles {
        let b = ms_steering(positions, deg.to_radians(), wavelength)?;
        let pb = &projector * &b;
        let denom: f64 = b.iter().zip(pb.iter()).map(|(x, y)| (x.conj() * y).re).sum();
        values.push(1.0 / denom.max(1e-300));
    }
    let (peak_idx, &peak_value) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or_else(|| Error::Ambiguity("empty grid".into()))?;
    Ok(Spectrum {
        peak_angle_deg: angles[peak_idx],
        angles_deg: angles,
        values,
        peak_value,
        normalization: Normalization::Linear,
    })
}

/// Uniform virtual array and interpolation-fit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualArraySpec {
    /// Virtual element pitch in meters (typically `d_min`).
    pub spacing: f64,
    /// Segment length covered by the virtual array, `[0, span]`.
    pub span: f64,
    /// Angle interval the interpolation map is fitted over, degrees.
    pub sector_deg: (f64, f64),
    /// Relative singular-value cutoff for the pseudo-inverse of the
    /// physical steering ensemble.
    pub sv_cutoff: f64,
    /// Fit-grid step inside the sector, degrees.
    pub fit_step_deg: f64,
}

impl VirtualArraySpec {
    /// Sector centered on the intended look direction, ±20°, with pitch
    /// `d_min` spanning the physical segment.
    pub fn for_layout(layout: &SensorLayout, look_deg: f64) -> Self {
        Self {
            spacing: layout.min_spacing,
            span: layout.aperture,
            sector_deg: (look_deg - 20.0, look_deg + 20.0),
            sv_cutoff: 1e-8,
            fit_step_deg: 0.25,
        }
    }

    /// Virtual element count `V = round(span / spacing) + 1`.
    pub fn element_count(&self) -> usize {
        (self.span / self.spacing).round() as usize + 1
    }

    /// Virtual element coordinates, centro-symmetric about `span / 2`.
    pub fn positions(&self) -> Vec<f64> {
        (0..self.element_count()).map(|i| i as f64 * self.spacing).collect()
    }
}

/// Residual diagnostics of the interpolation fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationFit {
    /// Worst per-angle relative residual `‖T b_phys − b_virt‖ / ‖b_virt‖`
    /// over the fit sector.
    pub max_residual: f64,
    pub mean_residual: f64,
}

/// Worst acceptable sector residual before the fit is declared
/// ill-conditioned.
const MAX_FIT_RESIDUAL: f64 = 0.5;

/// Sector-fitted interpolation operator `T` with fit diagnostics.
fn interpolation_map(
    layout: &SensorLayout,
    spec: &VirtualArraySpec,
    wavelength: f64,
) -> Result<(DMatrix<Complex64>, InterpolationFit)> {
    let k = layout.positions.len();
    let v_count = spec.element_count();
    if v_count < k {
        return Err(Error::Domain(format!(
            "virtual array ({v_count} elements) must not be smaller than the physical array ({k})"
        )));
    }
    let virtual_positions = spec.positions();
    let fit_grid = AngleGrid::new(spec.sector_deg.0, spec.sector_deg.1, spec.fit_step_deg)?;
    let angles = fit_grid.angles();

    let mut phys = DMatrix::<Complex64>::zeros(k, angles.len());
    let mut virt = DMatrix::<Complex64>::zeros(v_count, angles.len());
    for (col, &deg) in angles.iter().enumerate() {
        let bp = ms_steering(&layout.positions, deg.to_radians(), wavelength)?;
        let bv = ms_steering(&virtual_positions, deg.to_radians(), wavelength)?;
        phys.set_column(col, &bp);
        virt.set_column(col, &bv);
    }

    // T = B_v B_p⁺ with the pseudo-inverse truncated at a relative
    // singular-value cutoff.
    let svd = phys.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let pinv = svd
        .pseudo_inverse(spec.sv_cutoff * max_sv)
        .map_err(|_| Error::Conditioning { residual: f64::INFINITY })?;
    let map = &virt * pinv;

    let mut max_residual = 0.0f64;
    let mut sum_residual = 0.0f64;
    for (col, _) in angles.iter().enumerate() {
        let bp = phys.column(col);
        let bv = virt.column(col);
        let mapped = &map * bp;
        let residual = (&mapped - &DVector::from(bv.clone_owned())).norm() / bv.norm();
        max_residual = max_residual.max(residual);
        sum_residual += residual;
    }
    let fit = InterpolationFit {
        max_residual,
        mean_residual: sum_residual / angles.len() as f64,
    };
    if max_residual > MAX_FIT_RESIDUAL {
        return Err(Error::Conditioning { residual: max_residual });
    }
    Ok((map, fit))
}

/// Maps the sample covariance onto a uniform virtual array.
///
/// Builds the least-squares operator `T` minimizing the steering-vector
/// mismatch over the fit sector and returns `R_v = T R̂ Tᴴ` (hermitized)
/// together with fit diagnostics.
pub fn interpolate_virtual_array(
    covariance: &DMatrix<Complex64>,
    layout: &SensorLayout,
    spec: &VirtualArraySpec,
    wavelength: f64,
) -> Result<(DMatrix<Complex64>, InterpolationFit)> {
    if covariance.nrows() != layout.positions.len() {
        return Err(Error::Domain("covariance does not match layout size".into()));
    }
    let (map, fit) = interpolation_map(layout, spec, wavelength)?;
    let mapped = &map * covariance * map.adjoint();
    let hermitized = (&mapped + mapped.adjoint()) * Complex64::new(0.5, 0.0);
    Ok((hermitized, fit))
}

/// Whitened virtual-array model for interpolated MUSIC.
///
/// The map `T` is rank-deficient (rank ≤ K), so after interpolation the
/// noise covariance is `σ² T Tᴴ` — colored and singular. Running MUSIC on
/// `T R̂ Tᴴ` directly biases the peak by several degrees. Whitening with
/// `W = Λ^{-1/2} Uᴴ` from the top-K eigenpairs of `T Tᴴ` restores a white
/// noise floor in the K-dimensional range of the map.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitenedVirtualArray {
    /// K x K whitened virtual covariance `W (T R̂ Tᴴ) Wᴴ`.
    pub covariance: DMatrix<Complex64>,
    /// K x V whitener applied to virtual steering vectors.
    pub whitener: DMatrix<Complex64>,
    pub virtual_positions: Vec<f64>,
    pub fit: InterpolationFit,
}

/// Interpolates and whitens the sample covariance for virtual-array MUSIC.
pub fn whiten_virtual_array(
    covariance: &DMatrix<Complex64>,
    layout: &SensorLayout,
    spec: &VirtualArraySpec,
    wavelength: f64,
) -> Result<WhitenedVirtualArray> {
    let k = layout.positions.len();
    if covariance.nrows() != k {
        return Err(Error::Domain("covariance does not match layout size".into()));
    }
    let (map, fit) = interpolation_map(layout, spec, wavelength)?;
    let v_count = map.nrows();

    let gram = &map * map.adjoint();
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..v_count).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut whitener = DMatrix::<Complex64>::zeros(k, v_count);
    for (row, &idx) in order.iter().take(k).enumerate() {
        let ev = eig.eigenvalues[idx];
        if ev <= 1e-12 * eig.eigenvalues[order[0]] {
            return Err(Error::Conditioning { residual: f64::INFINITY });
        }
        let scale = Complex64::new(ev.sqrt().recip(), 0.0);
        for col in 0..v_count {
            whitener[(row, col)] = scale * eig.eigenvectors[(col, idx)].conj();
        }
    }

    let mapped = &whitener * (&map * covariance * map.adjoint()) * whitener.adjoint();
    let hermitized = (&mapped + mapped.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(WhitenedVirtualArray {
        covariance: hermitized,
        whitener,
        virtual_positions: spec.positions(),
        fit,
    })
}

/// MUSIC pseudo-spectrum on the whitened virtual array. Steering vectors
/// are `W b_v(θ)`, normalized to unit length so the spectrum scale matches
/// the direct route.
pub fn whitened_music_spectrum(
    whitened: &WhitenedVirtualArray,
    wavelength: f64,
    grid: &AngleGrid,
    source_count: usize,
) -> Result<Spectrum> {
    let projector = noise_projector(&whitened.covariance, source_count)?;
    let angles = grid.angles();
    let mut values = Vec::with_capacity(angles.len());
    for &deg in &angles {
        let bv = ms_steering(&whitened.virtual_positions, deg.to_radians(), wavelength)?;
        let mut bw = &whitened.whitener * bv;
        let norm = bw.norm().max(1e-300);
        bw /= Complex64::new(norm, 0.0);
        let pb = &projector * &bw;
        let denom: f64 = bw.iter().zip(pb.iter()).map(|(x, y)| (x.conj() * y).re).sum();
        values.push(1.0 / denom.max(1e-300));
    }
    let (peak_idx, &peak_value) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or_else(|| Error::Ambiguity("empty grid".into()))?;
    Ok(Spectrum {
        peak_angle_deg: angles[peak_idx],
        angles_deg: angles,
        values,
        peak_value,
        normalization: Normalization::Linear,
    })
}

/// Grid-peak location refined by three-point parabolic interpolation.
pub fn estimate_doa(spectrum: &Spectrum) -> Result<f64> {
    if spectrum.values.is_empty() {
        return Err(Error::Ambiguity("empty spectrum".into()));
    }
    let n = spectrum.values.len();
    let peak_idx = spectrum
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let min = spectrum.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = spectrum.values[peak_idx];
    if !(max.is_finite()) || max <= min * (1.0 + 1e-9) + 1e-300 {
        return Err(Error::Ambiguity("flat spectrum has no identifiable peak".into()));
    }
    if peak_idx == 0 || peak_idx == n - 1 {
        return Ok(spectrum.angles_deg[peak_idx]);
    }
    let (y0, y1, y2) =
        (spectrum.values[peak_idx - 1], spectrum.values[peak_idx], spectrum.values[peak_idx + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    let offset = if denom.abs() < 1e-300 { 0.0 } else { 0.5 * (y0 - y2) / denom };
    let step = spectrum.angles_deg[peak_idx] - spectrum.angles_deg[peak_idx - 1];
    Ok(spectrum.angles_deg[peak_idx] + offset.clamp(-0.5, 0.5) * step)
}

/// Estimation route for Monte Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pipeline {
    /// MUSIC directly on the physical array.
    Direct,
    /// MUSIC on the interpolated uniform virtual array.
    Interpolated,
}

/// Outcome of one Monte Carlo trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// Estimated DoA in degrees, absent if the trial errored.
    pub estimate_deg: Option<f64>,
}

/// Aggregate Monte Carlo result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub rmse_deg: f64,
    pub bias_deg: f64,
    pub records: Vec<TrialRecord>,
    pub failures: usize,
}

/// Stable seed-mixing for per-trial streams.
fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_mul(0x9E3779B97F4A7C15)).wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn run_trial(
    config: &SystemConfig,
    layout: &SensorLayout,
    seed: u64,
    pipeline: Pipeline,
    grid: &AngleGrid,
    beta0_mode: Beta0Mode,
) -> Result<f64> {
    let snapshots = synthesize_snapshots(config, layout, seed, beta0_mode)?;
    let covariance = sample_covariance(&snapshots);
    let spectrum = match pipeline {
        Pipeline::Direct => {
            music_spectrum(&covariance, &layout.positions, config.wavelength, grid, 1)?
        }
        Pipeline::Interpolated => {
            let spec = VirtualArraySpec::for_layout(layout, config.theta.to_degrees());
            let whitened = whiten_virtual_array(&covariance, layout, &spec, config.wavelength)?;
            whitened_music_spectrum(&whitened, config.wavelength, grid, 1)?
        }
    };
    estimate_doa(&spectrum)
}

/// Runs independent estimation trials with per-trial seeds derived from the
/// master seed, in parallel; aggregation is performed in trial order, so the
/// result is identical at any thread count.
pub fn monte_carlo_rmse(
    config: &SystemConfig,
    layout: &SensorLayout,
    trials: usize,
    seed: u64,
    pipeline: Pipeline,
    grid: &AngleGrid,
    beta0_mode: Beta0Mode,
) -> Result<MonteCarloResult> {
    if trials < 1 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = mix_seed(seed, trial as u64);
            let estimate =
                run_trial(config, layout, trial_seed, pipeline, grid, beta0_mode).ok();
            TrialRecord { trial, seed: trial_seed, estimate_deg: estimate }
        })
        .collect();

    let truth = config.theta.to_degrees();
    let successes: Vec<f64> =
        records.iter().filter_map(|r| r.estimate_deg).map(|est| est - truth).collect();
    let failures = trials - successes.len();
    if failures * 2 > trials {
        return Err(Error::TrialFailures { failed: failures, total: trials });
    }
    let n = successes.len() as f64;
    let bias = successes.iter().sum::<f64>() / n;
    let mse = successes.iter().map(|e| e * e).sum::<f64>() / n;
    Ok(MonteCarloResult { rmse_deg: mse.sqrt(), bias_deg: bias, records, failures })
}

/// MUSIC beampattern from a synthesized covariance, peak-normalized to 0 dB.
///
/// `snr_boost_db` lowers the noise power relative to the configured budget;
/// beampattern plots are usually drawn well above the estimation-threshold
/// SNR so the lobe structure is visible.
pub fn beampattern(
    config: &SystemConfig,
    positions: &[f64],
    pipeline: Pipeline,
    grid: &AngleGrid,
    seed: u64,
    snr_boost_db: f64,
) -> Result<Spectrum> {
    let mut config = config.clone();
    config.noise_power /= 10f64.powf(snr_boost_db / 10.0);
    let layout = layout_for_positions(&config, positions);
    let snapshots = synthesize_snapshots(&config, &layout, seed, Beta0Mode::FixedUnit)?;
    let covariance = sample_covariance(&snapshots);
    let spectrum = match pipeline {
        Pipeline::Direct => music_spectrum(&covariance, positions, config.wavelength, grid, 1)?,
        Pipeline::Interpolated => {
            let spec = VirtualArraySpec::for_layout(&layout, config.theta.to_degrees());
            let whitened = whiten_virtual_array(&covariance, &layout, &spec, config.wavelength)?;
            whitened_music_spectrum(&whitened, config.wavelength, grid, 1)?
        }
    };
    Ok(spectrum.to_peak_normalized_db())
}

/// Wraps arbitrary non-decreasing positions (e.g. the FP baseline) in a
/// layout the synthesis path accepts: single-sensor groups with the actual
/// minimum gap as spacing.
pub fn layout_for_positions(config: &SystemConfig, positions: &[f64]) -> SensorLayout {
    let min_gap = positions
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
        .min(config.min_spacing);
    let aperture = positions.last().copied().unwrap_or(0.0).max(config.aperture);
    SensorLayout::new(positions.to_vec(), positions.len(), 1, min_gap, aperture)
}
