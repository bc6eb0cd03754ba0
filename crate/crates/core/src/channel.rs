//! Steering vectors, path-loss chain, and the end-to-end response matrix.
//!
//! The probing signal travels BS → IRS passive elements → target → IRS
//! movable sensors. With the transmit beamformer matched to the BS departure
//! angle and the IRS phases aligning the reflection toward the target, the
//! scalar gain chain collapses to `N · sqrt(P0 · M)` times the propagation
//! amplitudes, and the sensor-side response matrix is rank one.

use crate::array_geometry::SensorLayout;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// Converts watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Converts dBsm to m².
pub fn dbsm_to_m2(dbsm: f64) -> f64 {
    10f64.powf(dbsm / 10.0)
}

/// Full physical/system parameter set.
///
/// Angles are stored in radians; constructors and the CLI boundary accept
/// degrees. Powers are in watts internally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// BS antenna count (even, >= 2).
    pub bs_antennas: usize,
    /// IRS passive-element count (even, >= 2).
    pub irs_elements: usize,
    /// Movable-sensor group count `L`.
    pub groups: usize,
    /// Sensors per group.
    pub per_group: usize,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// BS inter-antenna spacing in meters.
    pub bs_spacing: f64,
    /// IRS inter-element spacing in meters.
    pub irs_spacing: f64,
    /// Minimum inter-sensor spacing in meters.
    pub min_spacing: f64,
    /// Sensor segment length `D` in meters.
    pub aperture: f64,
    /// Target DoA in radians.
    pub theta: f64,
    /// IRS arrival angle (from the BS) in radians.
    pub theta_arrival: f64,
    /// BS departure angle in radians.
    pub theta_departure: f64,
    /// Transmit power in watts.
    pub power: f64,
    /// Snapshot count `T`.
    pub snapshots: usize,
    /// Sensor noise power in watts.
    pub noise_power: f64,
    /// BS-IRS distance in meters.
    pub bs_irs_distance: f64,
    /// IRS-target distance in meters.
    pub irs_target_distance: f64,
    /// Target radar cross section in m².
    pub rcs: f64,
}

impl Default for SystemConfig {
    /// Simulation defaults: 0.2 m wavelength, half-wavelength spacings,
    /// 2 m segment, 60° target, 15 dBm transmit power, -90 dBm noise,
    /// 60 m / 20 m link distances, 7 dBsm target.
    fn default() -> Self {
        Self {
            bs_antennas: 32,
            irs_elements: 32,
            groups: 4,
            per_group: 2,
            wavelength: 0.2,
            bs_spacing: 0.1,
            irs_spacing: 0.1,
            min_spacing: 0.1,
            aperture: 2.0,
            theta: 60f64.to_radians(),
            theta_arrival: 30f64.to_radians(),
            theta_departure: 15f64.to_radians(),
            power: dbm_to_watts(15.0),
            snapshots: 64,
            noise_power: dbm_to_watts(-90.0),
            bs_irs_distance: 60.0,
            irs_target_distance: 20.0,
            rcs: dbsm_to_m2(7.0),
        }
    }
}

impl SystemConfig {
    /// Total sensor count `K = L * per_group`.
    pub fn sensor_count(&self) -> usize {
        self.groups * self.per_group
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Domain(msg));
        if self.bs_antennas < 2 || self.bs_antennas % 2 != 0 {
            return err(format!("M must be even and >= 2, got {}", self.bs_antennas));
        }
        if self.irs_elements < 2 || self.irs_elements % 2 != 0 {
            return err(format!("N must be even and >= 2, got {}", self.irs_elements));
        }
        if self.sensor_count() < 2 || self.groups < 2 {
            return err(format!(
                "need L >= 2 and K = L*per_group >= 2, got L={}, per_group={}",
                self.groups, self.per_group
            ));
        }
        if self.theta.abs() >= PI / 2.0 {
            return err(format!("|theta| must be < 90 deg, got {} rad", self.theta));
        }
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("bs_spacing", self.bs_spacing),
            ("irs_spacing", self.irs_spacing),
            ("min_spacing", self.min_spacing),
            ("power", self.power),
            ("noise_power", self.noise_power),
            ("bs_irs_distance", self.bs_irs_distance),
            ("irs_target_distance", self.irs_target_distance),
            ("rcs", self.rcs),
        ] {
            if !(v > 0.0) {
                return err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.snapshots < 1 {
            return err("snapshot count must be >= 1".into());
        }
        let k = self.sensor_count() as f64;
        if self.aperture < (k - 1.0) * self.min_spacing - 1e-9 * self.aperture.max(1.0) {
            return err(format!(
                "aperture {} < (K-1)*d_min = {}",
                self.aperture,
                (k - 1.0) * self.min_spacing
            ));
        }
        Ok(())
    }
}

/// Amplitude factors of the BS-IRS-target-sensor propagation chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains {
    /// BS-IRS path amplitude `sqrt(λ² / (16 π² d_BI²))`.
    pub beta_bi: f64,
    /// IRS-target round-trip amplitude `sqrt(λ² κ / (64 π³ d_IT⁴))`.
    pub beta_1: f64,
    /// Small-scale fading factor.
    pub beta_0: Complex64,
    /// `|β_BI · β₀ · β₁|²`, the squared gain product in the CRB.
    pub product_sq: f64,
}

/// Path-loss amplitudes for the configured link distances and RCS.
pub fn channel_gains(config: &SystemConfig, beta_0: Complex64) -> Result<ChannelGains> {
    if config.bs_irs_distance <= 0.0 || config.irs_target_distance <= 0.0 || config.rcs <= 0.0 {
        return Err(Error::Domain("distances and RCS must be positive".into()));
    }
    let lambda = config.wavelength;
    let beta_bi = (lambda * lambda / (16.0 * PI * PI * config.bs_irs_distance.powi(2))).sqrt();
    let beta_1 =
        (lambda * lambda * config.rcs / (64.0 * PI.powi(3) * config.irs_target_distance.powi(4)))
            .sqrt();
    let product_sq = beta_0.norm_sqr() * beta_bi * beta_bi * beta_1 * beta_1;
    Ok(ChannelGains { beta_bi, beta_1, beta_0, product_sq })
}

/// Centroid-referenced ULA steering vector.
///
/// Entry `n` (1-based) is `exp(jπ (2n − count − 1) · spacing · sin(angle) / λ)`,
/// so the phase reference sits at the array centroid and the derivative is
/// orthogonal to the vector itself.
pub fn ula_steering(
    count: usize,
    spacing: f64,
    angle: f64,
    wavelength: f64,
) -> Result<DVector<Complex64>> {
    if count < 2 || count % 2 != 0 {
        return Err(Error::Domain(format!("ULA element count must be even and >= 2, got {count}")));
    }
    let phase_step = PI * spacing * angle.sin() / wavelength;
    Ok(DVector::from_fn(count, |n, _| {
        Complex64::from_polar(1.0, (2.0 * (n as f64 + 1.0) - count as f64 - 1.0) * phase_step)
    }))
}

/// Angle-derivative of [`ula_steering`]: `jπ (spacing/λ) cos(angle) · (2n − count − 1) · a_n`.
pub fn ula_steering_derivative(
    count: usize,
    spacing: f64,
    angle: f64,
    wavelength: f64,
) -> Result<DVector<Complex64>> {
    let a = ula_steering(count, spacing, angle, wavelength)?;
    let scale = PI * spacing * angle.cos() / wavelength;
    Ok(DVector::from_fn(count, |n, _| {
        Complex64::new(0.0, scale * (2.0 * (n as f64 + 1.0) - count as f64 - 1.0)) * a[n]
    }))
}

/// Movable-sensor steering vector: entry `k` is `exp(j 2π x_k sin(angle) / λ)`.
pub fn ms_steering(positions: &[f64], angle: f64, wavelength: f64) -> Result<DVector<Complex64>> {
    if positions.is_empty() {
        return Err(Error::Domain("steering vector of an empty array".into()));
    }
    let scale = 2.0 * PI * angle.sin() / wavelength;
    Ok(DVector::from_fn(positions.len(), |k, _| Complex64::from_polar(1.0, scale * positions[k])))
}

/// Angle-derivative of [`ms_steering`]: entry `k` is `j (2π/λ) cos(angle) x_k b_k`.
pub fn ms_steering_derivative(
    positions: &[f64],
    angle: f64,
    wavelength: f64,
) -> Result<DVector<Complex64>> {
    let b = ms_steering(positions, angle, wavelength)?;
    let scale = 2.0 * PI * angle.cos() / wavelength;
    Ok(DVector::from_fn(positions.len(), |k, _| {
        Complex64::new(0.0, scale * positions[k]) * b[k]
    }))
}

/// Power-maximizing transmit beamformer `w = sqrt(P0/M) · conj(c(θ_D))`.
pub fn optimal_beamformer(config: &SystemConfig) -> Result<DVector<Complex64>> {
    let c = ula_steering(
        config.bs_antennas,
        config.bs_spacing,
        config.theta_departure,
        config.wavelength,
    )?;
    let amp = (config.power / config.bs_antennas as f64).sqrt();
    Ok(c.map(|v| v.conj() * amp))
}

/// IRS phase profile aligning the reflection toward the target:
/// `φ_n = conj(a_n(θ) a_n(θ_A)) / |·|`, so `|aᵀ(θ) Φ a(θ_A)| = N`.
pub fn optimal_phase_shifts(config: &SystemConfig) -> Result<DVector<Complex64>> {
    let a_theta =
        ula_steering(config.irs_elements, config.irs_spacing, config.theta, config.wavelength)?;
    let a_arr = ula_steering(
        config.irs_elements,
        config.irs_spacing,
        config.theta_arrival,
        config.wavelength,
    )?;
    Ok(DVector::from_fn(config.irs_elements, |n, _| {
        let prod = a_theta[n] * a_arr[n];
        (prod / prod.norm()).conj()
    }))
}

/// Scalar chain `(aᵀ(θ) Φ a(θ_A)) · (cᵀ(θ_D) w)` for given phases and beamformer.
pub fn scalar_chain(
    config: &SystemConfig,
    phases: &DVector<Complex64>,
    beamformer: &DVector<Complex64>,
) -> Result<Complex64> {
    let a_theta =
        ula_steering(config.irs_elements, config.irs_spacing, config.theta, config.wavelength)?;
    let a_arr = ula_steering(
        config.irs_elements,
        config.irs_spacing,
        config.theta_arrival,
        config.wavelength,
    )?;
    let c = ula_steering(
        config.bs_antennas,
        config.bs_spacing,
        config.theta_departure,
        config.wavelength,
    )?;
    let irs_term: Complex64 = (0..config.irs_elements).map(|n| a_theta[n] * phases[n] * a_arr[n]).sum();
    let bs_term: Complex64 = (0..config.bs_antennas).map(|m| c[m] * beamformer[m]).sum();
    Ok(irs_term * bs_term)
}

/// End-to-end sensor response matrix and its angle-derivative.
///
/// `B = b(x,θ) (aᵀ(θ) Φ a(θ_A)) cᵀ(θ_D)` is rank one; the derivative follows
/// the product rule through `b` and `a(θ)`.
pub fn response_matrix(
    config: &SystemConfig,
    layout: &SensorLayout,
    phases: &DVector<Complex64>,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if phases.len() != config.irs_elements {
        return Err(Error::Domain(format!(
            "phase vector length {} does not match N = {}",
            phases.len(),
            config.irs_elements
        )));
    }
    let lambda = config.wavelength;
    let b = ms_steering(&layout.positions, config.theta, lambda)?;
    let b_dot = ms_steering_derivative(&layout.positions, config.theta, lambda)?;
    let a_theta = ula_steering(config.irs_elements, config.irs_spacing, config.theta, lambda)?;
    let a_dot =
        ula_steering_derivative(config.irs_elements, config.irs_spacing, config.theta, lambda)?;
    let a_arr = ula_steering(config.irs_elements, config.irs_spacing, config.theta_arrival, lambda)?;
    let c = ula_steering(config.bs_antennas, config.bs_spacing, config.theta_departure, lambda)?;

    // Scalars a^T Φ a(θ_A) and ȧ^T Φ a(θ_A).
    let s_a: Complex64 = (0..config.irs_elements).map(|n| a_theta[n] * phases[n] * a_arr[n]).sum();
    let s_adot: Complex64 = (0..config.irs_elements).map(|n| a_dot[n] * phases[n] * a_arr[n]).sum();

    let k = layout.positions.len();
    let m = config.bs_antennas;
    let response = DMatrix::from_fn(k, m, |i, j| b[i] * s_a * c[j]);
    let derivative = DMatrix::from_fn(k, m, |i, j| (b_dot[i] * s_a + b[i] * s_adot) * c[j]);
    Ok((response, derivative))
}
