//! Scenario files: the JSON boundary of the CLI.
//!
//! Scenario files use user-facing units (dBm, degrees, meters) and explicit
//! keys; unknown keys are rejected so a typo cannot silently fall back to a
//! default. Every key is optional — omitted values take the simulation
//! defaults of [`SystemConfig::default`].

use crate::channel::{dbm_to_watts, dbsm_to_m2, SystemConfig};
use crate::crb::{BudgetSpec, ParityPolicy};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Estimation scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Fixed half-wavelength sensor positions.
    Fp,
    /// Optimally placed movable sensors, MUSIC on the physical array.
    Ms,
    /// Movable sensors with interpolated virtual-array MUSIC.
    MsInterp,
}

impl Scheme {
    pub fn parse(label: &str) -> Result<Self> {
        match label.trim().to_ascii_uppercase().as_str() {
            "FP" => Ok(Self::Fp),
            "MS" => Ok(Self::Ms),
            "MS-INTERP" | "MS_INTERP" | "MSINTERP" => Ok(Self::MsInterp),
            other => Err(Error::Scenario(format!(
                "unknown scheme {other:?}; expected FP, MS, or MS-Interp"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Fp => "FP",
            Self::Ms => "MS",
            Self::MsInterp => "MS-Interp",
        }
    }
}

/// Sweep axis: which parameter varies and over which values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `"power_dbm"` or `"sensors"`.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BudgetFile {
    total: f64,
    element_weight: f64,
    group_weight: f64,
    /// `"odd"`, `"even"`, or `"both"` (default).
    parity: Option<String>,
}

/// Raw scenario file contents, in user units.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ScenarioFile {
    name: Option<String>,
    bs_antennas: Option<usize>,
    irs_elements: Option<usize>,
    groups: Option<usize>,
    per_group: Option<usize>,
    wavelength_m: Option<f64>,
    bs_spacing_m: Option<f64>,
    irs_spacing_m: Option<f64>,
    min_spacing_m: Option<f64>,
    aperture_m: Option<f64>,
    theta_deg: Option<f64>,
    theta_arrival_deg: Option<f64>,
    theta_departure_deg: Option<f64>,
    power_dbm: Option<f64>,
    snapshots: Option<usize>,
    noise_dbm: Option<f64>,
    bs_irs_distance_m: Option<f64>,
    irs_target_distance_m: Option<f64>,
    rcs_dbsm: Option<f64>,
    schemes: Option<Vec<String>>,
    trials: Option<usize>,
    seed: Option<u64>,
    sweep: Option<SweepSpec>,
    budget: Option<BudgetFile>,
    /// SNR boost applied when drawing beampatterns, in dB.
    beampattern_snr_boost_db: Option<f64>,
}

/// Fully resolved scenario with defaults applied and units converted.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub config: SystemConfig,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
    pub seed: u64,
    pub sweep: Option<SweepSpec>,
    pub budget: BudgetSpec,
    pub beampattern_snr_boost_db: f64,
}

impl Default for Scenario {
    /// The simulation setup of the reference figures.
    fn default() -> Self {
        Self {
            name: "default".into(),
            config: SystemConfig::default(),
            schemes: vec![Scheme::Fp, Scheme::Ms, Scheme::MsInterp],
            trials: 200,
            seed: 1,
            sweep: None,
            budget: BudgetSpec {
                total: 200.0,
                element_weight: 1.0,
                group_weight: 2.0,
                parity: ParityPolicy::Both,
            },
            beampattern_snr_boost_db: 25.0,
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Self::resolve(file)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    fn resolve(file: ScenarioFile) -> Result<Self> {
        let defaults = Scenario::default();
        let mut config = defaults.config;
        if let Some(v) = file.bs_antennas {
            config.bs_antennas = v;
        }
        if let Some(v) = file.irs_elements {
            config.irs_elements = v;
        }
        if let Some(v) = file.groups {
            config.groups = v;
        }
        if let Some(v) = file.per_group {
            config.per_group = v;
        }
        if let Some(v) = file.wavelength_m {
            config.wavelength = v;
        }
        if let Some(v) = file.bs_spacing_m {
            config.bs_spacing = v;
        }
        if let Some(v) = file.irs_spacing_m {
            config.irs_spacing = v;
        }
        if let Some(v) = file.min_spacing_m {
            config.min_spacing = v;
        }
        if let Some(v) = file.aperture_m {
            config.aperture = v;
        }
        if let Some(v) = file.theta_deg {
            config.theta = v.to_radians();
        }
        if let Some(v) = file.theta_arrival_deg {
            config.theta_arrival = v.to_radians();
        }
        if let Some(v) = file.theta_departure_deg {
            config.theta_departure = v.to_radians();
        }
        if let Some(v) = file.power_dbm {
            config.power = dbm_to_watts(v);
        }
        if let Some(v) = file.snapshots {
            config.snapshots = v;
        }
        if let Some(v) = file.noise_dbm {
            config.noise_power = dbm_to_watts(v);
        }
        if let Some(v) = file.bs_irs_distance_m {
            config.bs_irs_distance = v;
        }
        if let Some(v) = file.irs_target_distance_m {
            config.irs_target_distance = v;
        }
        if let Some(v) = file.rcs_dbsm {
            config.rcs = dbsm_to_m2(v);
        }
        config.validate()?;

        let schemes = match file.schemes {
            None => defaults.schemes,
            Some(labels) => parse_schemes(&labels)?,
        };

        if let Some(sweep) = &file.sweep {
            validate_sweep(sweep)?;
        }

        let budget = match file.budget {
            None => defaults.budget,
            Some(b) => {
                let parity = match b.parity.as_deref().unwrap_or("both") {
                    "odd" => ParityPolicy::OddOnly,
                    "even" => ParityPolicy::EvenOnly,
                    "both" => ParityPolicy::Both,
                    other => {
                        return Err(Error::Scenario(format!(
                            "unknown budget parity {other:?}; expected odd, even, or both"
                        )))
                    }
                };
                let spec = BudgetSpec {
                    total: b.total,
                    element_weight: b.element_weight,
                    group_weight: b.group_weight,
                    parity,
                };
                spec.validate()?;
                spec
            }
        };

        Ok(Self {
            name: sanitize_name(file.name.as_deref().unwrap_or("default"))?,
            config,
            schemes,
            trials: file.trials.unwrap_or(defaults.trials),
            seed: file.seed.unwrap_or(defaults.seed),
            sweep: file.sweep,
            budget,
            beampattern_snr_boost_db: file
                .beampattern_snr_boost_db
                .unwrap_or(defaults.beampattern_snr_boost_db),
        })
    }
}

/// Parses a scheme list, rejecting empties and duplicates.
pub fn parse_schemes(labels: &[String]) -> Result<Vec<Scheme>> {
    if labels.is_empty() {
        return Err(Error::Scenario("scheme list must not be empty".into()));
    }
    let mut schemes = Vec::with_capacity(labels.len());
    for label in labels {
        let scheme = Scheme::parse(label)?;
        if schemes.contains(&scheme) {
            return Err(Error::Scenario(format!("duplicate scheme {:?}", scheme.label())));
        }
        schemes.push(scheme);
    }
    Ok(schemes)
}

fn validate_sweep(sweep: &SweepSpec) -> Result<()> {
    if sweep.values.is_empty() {
        return Err(Error::Scenario("sweep values must not be empty".into()));
    }
    match sweep.parameter.as_str() {
        "power_dbm" => Ok(()),
        "sensors" => {
            for &v in &sweep.values {
                if v < 2.0 || v.fract() != 0.0 {
                    return Err(Error::Scenario(format!(
                        "sensor sweep values must be integers >= 2, got {v}"
                    )));
                }
            }
            Ok(())
        }
        other => Err(Error::Scenario(format!(
            "unknown sweep parameter {other:?}; expected power_dbm or sensors"
        ))),
    }
}

fn sanitize_name(name: &str) -> Result<String> {
    if name.is_empty()
        || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(Error::Scenario(format!(
            "scenario name {name:?} must be non-empty and use only [A-Za-z0-9_-]"
        )));
    }
    Ok(name.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_object_gives_paper_defaults() {
        let scenario = Scenario::from_json("{}").unwrap();
        assert_eq!(scenario, Scenario::default());
        let c = &scenario.config;
        assert_eq!((c.bs_antennas, c.irs_elements, c.groups, c.per_group), (32, 32, 4, 2));
        assert_abs_diff_eq!(c.power, 10f64.powf(1.5) * 1e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(c.noise_power, 1e-12, epsilon = 1e-24);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = Scenario::from_json(r#"{"powr_dbm": 15.0}"#).unwrap_err();
        assert!(matches!(err, Error::Json(_)), "{err:?}");
    }

    #[test]
    fn unit_conversion_at_boundary() {
        let scenario = Scenario::from_json(
            r#"{"power_dbm": 20.0, "noise_dbm": -80.0, "theta_deg": 45.0, "rcs_dbsm": 10.0}"#,
        )
        .unwrap();
        let c = &scenario.config;
        assert_abs_diff_eq!(c.power, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(c.noise_power, 1e-11, epsilon = 1e-22);
        assert_abs_diff_eq!(c.theta, std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(c.rcs, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn scheme_parsing_and_duplicates() {
        assert_eq!(Scheme::parse("fp").unwrap(), Scheme::Fp);
        assert_eq!(Scheme::parse("MS-Interp").unwrap(), Scheme::MsInterp);
        assert!(Scheme::parse("music").is_err());
        assert!(parse_schemes(&[]).is_err());
        assert!(parse_schemes(&["MS".into(), "ms".into()]).is_err());
    }

    #[test]
    fn invalid_config_rejected() {
        // Odd antenna count violates the even-array assumption.
        let err = Scenario::from_json(r#"{"bs_antennas": 31}"#).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err:?}");
        // Aperture too small for K sensors.
        assert!(Scenario::from_json(r#"{"aperture_m": 0.5}"#).is_err());
    }

    #[test]
    fn sweep_validation() {
        assert!(Scenario::from_json(
            r#"{"sweep": {"parameter": "power_dbm", "values": [0, 5, 10]}}"#
        )
        .is_ok());
        assert!(Scenario::from_json(
            r#"{"sweep": {"parameter": "sensors", "values": [4.5]}}"#
        )
        .is_err());
        assert!(Scenario::from_json(r#"{"sweep": {"parameter": "snr", "values": [1]}}"#).is_err());
        assert!(Scenario::from_json(
            r#"{"sweep": {"parameter": "power_dbm", "values": []}}"#
        )
        .is_err());
    }

    #[test]
    fn budget_parsing() {
        let scenario = Scenario::from_json(
            r#"{"budget": {"total": 100, "element_weight": 1, "group_weight": 5, "parity": "odd"}}"#,
        )
        .unwrap();
        assert_eq!(scenario.budget.parity, ParityPolicy::OddOnly);
        assert!(Scenario::from_json(
            r#"{"budget": {"total": 1, "element_weight": 1, "group_weight": 5}}"#
        )
        .is_err());
    }

    #[test]
    fn name_sanitization() {
        assert!(Scenario::from_json(r#"{"name": "fig2_sweep"}"#).is_ok());
        assert!(Scenario::from_json(r#"{"name": "../escape"}"#).is_err());
        assert!(Scenario::from_json(r#"{"name": ""}"#).is_err());
    }
}
