//! Python bindings for the IRS sensing toolkit.
//!
//! Exposes the system configuration, placement, CRB, and estimation entry
//! points with user-facing units (dBm, degrees, meters) at the boundary.

use irs_sensing::array_geometry::{
    self, optimal_positions as optimal_positions_rs, PlacementVariant,
};
use irs_sensing::channel::{dbm_to_watts, dbsm_to_m2, watts_to_dbm, SystemConfig};
use irs_sensing::crb;
use irs_sensing::error::Error;
use irs_sensing::estimation::{self, AngleGrid, Beta0Mode, Pipeline};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn to_py_err(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// System configuration in user units; wraps the core config.
#[pyclass(name = "Config")]
#[derive(Clone)]
struct PyConfig {
    inner: SystemConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (
        bs_antennas = 32, irs_elements = 32, groups = 4, per_group = 2,
        wavelength_m = 0.2, min_spacing_m = 0.1, aperture_m = 2.0,
        theta_deg = 60.0, theta_arrival_deg = 30.0, theta_departure_deg = 15.0,
        power_dbm = 15.0, snapshots = 64, noise_dbm = -90.0,
        bs_irs_distance_m = 60.0, irs_target_distance_m = 20.0, rcs_dbsm = 7.0
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        bs_antennas: usize,
        irs_elements: usize,
        groups: usize,
        per_group: usize,
        wavelength_m: f64,
        min_spacing_m: f64,
        aperture_m: f64,
        theta_deg: f64,
        theta_arrival_deg: f64,
        theta_departure_deg: f64,
        power_dbm: f64,
        snapshots: usize,
        noise_dbm: f64,
        bs_irs_distance_m: f64,
        irs_target_distance_m: f64,
        rcs_dbsm: f64,
    ) -> PyResult<Self> {
        let inner = SystemConfig {
            bs_antennas,
            irs_elements,
            groups,
            per_group,
            wavelength: wavelength_m,
            bs_spacing: wavelength_m / 2.0,
            irs_spacing: wavelength_m / 2.0,
            min_spacing: min_spacing_m,
            aperture: aperture_m,
            theta: theta_deg.to_radians(),
            theta_arrival: theta_arrival_deg.to_radians(),
            theta_departure: theta_departure_deg.to_radians(),
            power: dbm_to_watts(power_dbm),
            snapshots,
            noise_power: dbm_to_watts(noise_dbm),
            bs_irs_distance: bs_irs_distance_m,
            irs_target_distance: irs_target_distance_m,
            rcs: dbsm_to_m2(rcs_dbsm),
        };
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Total sensor count K.
    #[getter]
    fn sensor_count(&self) -> usize {
        self.inner.sensor_count()
    }

    #[getter]
    fn power_dbm(&self) -> f64 {
        watts_to_dbm(self.inner.power)
    }

    #[getter]
    fn theta_deg(&self) -> f64 {
        self.inner.theta.to_degrees()
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(M={}, N={}, L={}, per_group={}, theta={:.1} deg, P0={:.1} dBm)",
            self.inner.bs_antennas,
            self.inner.irs_elements,
            self.inner.groups,
            self.inner.per_group,
            self.theta_deg(),
            self.power_dbm()
        )
    }
}

/// Optimal grouped sensor positions on [0, D], in meters.
#[pyfunction]
#[pyo3(signature = (config, right_heavy = false))]
fn optimal_positions(config: &PyConfig, right_heavy: bool) -> PyResult<Vec<f64>> {
    let variant =
        if right_heavy { PlacementVariant::RightHeavy } else { PlacementVariant::LeftHeavy };
    let layout = optimal_positions_rs(
        config.inner.aperture,
        config.inner.per_group,
        config.inner.groups,
        config.inner.min_spacing,
        variant,
    )
    .map_err(to_py_err)?;
    Ok(layout.positions)
}

/// Positional variance of the optimal grouped placement, in m².
#[pyfunction]
fn closed_form_variance(config: &PyConfig) -> PyResult<f64> {
    array_geometry::closed_form_variance(
        config.inner.aperture,
        config.inner.per_group,
        config.inner.groups,
        config.inner.min_spacing,
    )
    .map_err(to_py_err)
}

/// Half-wavelength baseline positions, in meters.
#[pyfunction]
fn fp_positions(config: &PyConfig) -> PyResult<Vec<f64>> {
    array_geometry::fp_positions(config.inner.sensor_count(), config.inner.wavelength)
        .map_err(to_py_err)
}

/// CRB of the optimally placed movable-sensor array, in dB (deg² scale).
#[pyfunction]
fn crb_ms_db(config: &PyConfig) -> PyResult<f64> {
    Ok(crb::crb_ms_opt(&config.inner).map_err(to_py_err)?.crb_db)
}

/// CRB of the fixed-position baseline, in dB (deg² scale).
#[pyfunction]
fn crb_fp_db(config: &PyConfig) -> PyResult<f64> {
    Ok(crb::crb_fp(&config.inner).map_err(to_py_err)?.crb_db)
}

/// MS-over-FP CRB gap in dB.
#[pyfunction]
fn reduction_gap_db(config: &PyConfig) -> PyResult<f64> {
    crb::reduction_gap_db(&config.inner).map_err(to_py_err)
}

fn pipeline_for(scheme: &str) -> PyResult<(bool, Pipeline)> {
    // (uses FP positions, pipeline)
    match scheme.to_ascii_uppercase().as_str() {
        "FP" => Ok((true, Pipeline::Direct)),
        "MS" => Ok((false, Pipeline::Direct)),
        "MS-INTERP" | "MS_INTERP" => Ok((false, Pipeline::Interpolated)),
        other => Err(PyValueError::new_err(format!(
            "unknown scheme {other:?}; expected FP, MS, or MS-Interp"
        ))),
    }
}

/// Peak-normalized MUSIC beampattern in dB; returns (angles_deg, values_db,
/// peak_angle_deg).
#[pyfunction]
#[pyo3(signature = (config, scheme, start_deg, stop_deg, step_deg, seed = 1, snr_boost_db = 25.0))]
fn beampattern(
    config: &PyConfig,
    scheme: &str,
    start_deg: f64,
    stop_deg: f64,
    step_deg: f64,
    seed: u64,
    snr_boost_db: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let (use_fp, pipeline) = pipeline_for(scheme)?;
    let positions = if use_fp {
        array_geometry::fp_positions(config.inner.sensor_count(), config.inner.wavelength)
            .map_err(to_py_err)?
    } else {
        optimal_positions_rs(
            config.inner.aperture,
            config.inner.per_group,
            config.inner.groups,
            config.inner.min_spacing,
            PlacementVariant::LeftHeavy,
        )
        .map_err(to_py_err)?
        .positions
    };
    let grid = AngleGrid::new(start_deg, stop_deg, step_deg).map_err(to_py_err)?;
    let spectrum =
        estimation::beampattern(&config.inner, &positions, pipeline, &grid, seed, snr_boost_db)
            .map_err(to_py_err)?;
    Ok((spectrum.angles_deg.clone(), spectrum.values.clone(), spectrum.peak_angle_deg))
}

/// Monte Carlo MUSIC study; returns (rmse_deg, bias_deg, failures).
#[pyfunction]
#[pyo3(signature = (config, scheme, trials, seed = 1, sector_deg = 4.0, step_deg = 0.05))]
fn monte_carlo_rmse(
    config: &PyConfig,
    scheme: &str,
    trials: usize,
    seed: u64,
    sector_deg: f64,
    step_deg: f64,
) -> PyResult<(f64, f64, usize)> {
    let (use_fp, pipeline) = pipeline_for(scheme)?;
    let layout = if use_fp {
        estimation::layout_for_positions(
            &config.inner,
            &array_geometry::fp_positions(config.inner.sensor_count(), config.inner.wavelength)
                .map_err(to_py_err)?,
        )
    } else {
        optimal_positions_rs(
            config.inner.aperture,
            config.inner.per_group,
            config.inner.groups,
            config.inner.min_spacing,
            PlacementVariant::LeftHeavy,
        )
        .map_err(to_py_err)?
    };
    let theta_deg = config.inner.theta.to_degrees();
    let grid = AngleGrid::new(theta_deg - sector_deg, theta_deg + sector_deg, step_deg)
        .map_err(to_py_err)?;
    let result = estimation::monte_carlo_rmse(
        &config.inner,
        &layout,
        trials,
        seed,
        pipeline,
        &grid,
        Beta0Mode::FixedUnit,
    )
    .map_err(to_py_err)?;
    Ok((result.rmse_deg, result.bias_deg, result.failures))
}

#[pymodule]
fn irs_sensing_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(optimal_positions, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_variance, m)?)?;
    m.add_function(wrap_pyfunction!(fp_positions, m)?)?;
    m.add_function(wrap_pyfunction!(crb_ms_db, m)?)?;
    m.add_function(wrap_pyfunction!(crb_fp_db, m)?)?;
    m.add_function(wrap_pyfunction!(reduction_gap_db, m)?)?;
    m.add_function(wrap_pyfunction!(beampattern, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_rmse, m)?)?;
    Ok(())
}
