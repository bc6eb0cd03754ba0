//! Scenario-driven experiment runners.
//!
//! Each runner turns a [`Scenario`] into named tables and plot specs; the
//! harness adds no arithmetic of its own — every CRB cell is produced by a
//! direct call into [`crate::crb`], every spectrum by [`crate::estimation`].

pub mod output;
pub mod scenario;

use crate::array_geometry::{brute_force_optimal, fp_positions, optimal_positions, PlacementVariant};
use crate::channel::{dbm_to_watts, watts_to_dbm, SystemConfig};
use crate::crb::{budget_optimal_groups, crb_fp, crb_ms_opt, reduction_gap_db};
use crate::error::{Error, Result};
use crate::estimation::{beampattern, monte_carlo_rmse, AngleGrid, Beta0Mode, Pipeline};
use output::{Cell, PlotSpec, Series, Table};
use scenario::{Scenario, Scheme};

/// Tables, plots, and advisory notes produced by one runner.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub plots: Vec<PlotSpec>,
    /// Skipped combinations and other non-fatal diagnostics.
    pub notes: Vec<String>,
}

/// (M, N, K) variants of the CRB-vs-power study.
const POWER_VARIANTS: [(usize, usize, usize); 4] =
    [(32, 32, 8), (64, 32, 8), (32, 64, 8), (32, 32, 16)];

fn config_for(base: &SystemConfig, m: usize, n: usize, k: usize) -> Result<SystemConfig> {
    let mut config = base.clone();
    config.bs_antennas = m;
    config.irs_elements = n;
    if k % config.per_group != 0 {
        return Err(Error::Domain(format!(
            "K={k} is not a multiple of per_group={}",
            config.per_group
        )));
    }
    config.groups = k / config.per_group;
    config.validate()?;
    Ok(config)
}

fn power_values(scenario: &Scenario) -> Vec<f64> {
    match &scenario.sweep {
        Some(sweep) if sweep.parameter == "power_dbm" => sweep.values.clone(),
        _ => (0..=20).map(f64::from).collect(),
    }
}

fn sensor_values(scenario: &Scenario) -> Vec<usize> {
    match &scenario.sweep {
        Some(sweep) if sweep.parameter == "sensors" => {
            sweep.values.iter().map(|&v| v as usize).collect()
        }
        _ => (2..=10).map(|l| 2 * l).collect(),
    }
}

/// CRB versus transmit power over the (M, N, K) variants.
pub fn run_crb_vs_power(scenario: &Scenario) -> Result<RunOutput> {
    let powers = power_values(scenario);
    let mut table =
        Table::new(&format!("{}_crb_vs_power", scenario.name), &["p0_dbm", "m", "n", "k", "crb_db"]);
    let mut notes = Vec::new();
    let mut series = Vec::new();
    for &(m, n, k) in &POWER_VARIANTS {
        let base = match config_for(&scenario.config, m, n, k) {
            Ok(config) => config,
            Err(err) => {
                notes.push(format!("skipped M={m} N={n} K={k}: {err}"));
                continue;
            }
        };
        let mut points = Vec::new();
        for &p0 in &powers {
            let mut config = base.clone();
            config.power = dbm_to_watts(p0);
            let report = crb_ms_opt(&config)?;
            table.push(vec![p0.into(), m.into(), n.into(), k.into(), report.crb_db.into()]);
            points.push((p0, report.crb_db));
        }
        series.push(Series { name: format!("M={m}, N={n}, K={k}"), points });
    }
    if table.rows.is_empty() {
        return Err(Error::Domain("no feasible (M, N, K) variant in this scenario".into()));
    }
    let plots = vec![PlotSpec {
        file_stem: table.name.clone(),
        title: "CRB vs transmit power".into(),
        x_label: "P0 (dBm)".into(),
        y_label: "CRB (dB)".into(),
        series,
    }];
    Ok(RunOutput { tables: vec![table], plots, notes })
}

/// Monte Carlo RMSE versus transmit power for the scenario's schemes.
pub fn run_rmse_vs_power(scenario: &Scenario, trials: usize) -> Result<RunOutput> {
    if trials == 0 {
        return Err(Error::Domain("rmse study needs trials >= 1".into()));
    }
    let powers: Vec<f64> = match &scenario.sweep {
        Some(sweep) if sweep.parameter == "power_dbm" => sweep.values.clone(),
        _ => vec![0.0, 5.0, 10.0, 15.0, 20.0],
    };
    // Fine-search sector around the known coarse direction; +-4 deg keeps the
    // first grating ambiguity of the grouped geometry (±13.5 deg at the
    // reference setup) out of the search space.
    let theta_deg = scenario.config.theta.to_degrees();
    let grid = AngleGrid::new(theta_deg - 4.0, theta_deg + 4.0, 0.05)?;
    let ms_layout = optimal_positions(
        scenario.config.aperture,
        scenario.config.per_group,
        scenario.config.groups,
        scenario.config.min_spacing,
        PlacementVariant::LeftHeavy,
    )?;
    let fp_layout = crate::estimation::layout_for_positions(
        &scenario.config,
        &fp_positions(scenario.config.sensor_count(), scenario.config.wavelength)?,
    );

    let mut table = Table::new(
        &format!("{}_rmse_vs_power", scenario.name),
        &["p0_dbm", "scheme", "trials", "rmse_deg", "crb_rmse_deg", "failures"],
    );
    let mut notes = Vec::new();
    let mut series = Vec::new();
    for &scheme in &scenario.schemes {
        let (layout, pipeline) = match scheme {
            Scheme::Fp => (&fp_layout, Pipeline::Direct),
            Scheme::Ms => (&ms_layout, Pipeline::Direct),
            Scheme::MsInterp => (&ms_layout, Pipeline::Interpolated),
        };
        let mut points = Vec::new();
        for &p0 in &powers {
            let mut config = scenario.config.clone();
            config.power = dbm_to_watts(p0);
            let crb = match scheme {
                Scheme::Fp => crb_fp(&config)?,
                _ => crb_ms_opt(&config)?,
            };
            let result = match monte_carlo_rmse(
                &config,
                layout,
                trials,
                scenario.seed,
                pipeline,
                &grid,
                Beta0Mode::FixedUnit,
            ) {
                Ok(result) => result,
                Err(err) => {
                    notes.push(format!("skipped {} at P0={p0} dBm: {err}", scheme.label()));
                    continue;
                }
            };
            table.push(vec![
                p0.into(),
                scheme.label().into(),
                trials.into(),
                result.rmse_deg.into(),
                crb.crb_deg2.sqrt().into(),
                result.failures.into(),
            ]);
            points.push((p0, result.rmse_deg));
        }
        series.push(Series { name: scheme.label().into(), points });
    }
    let plots = vec![PlotSpec {
        file_stem: table.name.clone(),
        title: "MUSIC RMSE vs transmit power".into(),
        x_label: "P0 (dBm)".into(),
        y_label: "RMSE (deg)".into(),
        series,
    }];
    Ok(RunOutput { tables: vec![table], plots, notes })
}

/// CRB versus sensor count for the movable and fixed schemes, with the
/// MS−FP gap and the measured no-grouping delta.
pub fn run_crb_vs_sensors(scenario: &Scenario) -> Result<RunOutput> {
    let sensor_counts = sensor_values(scenario);
    let elements = [32usize, 64];
    let mut table = Table::new(
        &format!("{}_crb_vs_k", scenario.name),
        &["k", "scheme", "n", "crb_db", "gap_db", "no_grouping_delta_db"],
    );
    let mut notes = Vec::new();
    let mut series: Vec<Series> = Vec::new();
    for &n in &elements {
        for scheme in [Scheme::Ms, Scheme::Fp] {
            // MS-Interp shares the MS geometry, hence the MS bound.
            let wanted = match scheme {
                Scheme::Ms => {
                    scenario.schemes.contains(&Scheme::Ms)
                        || scenario.schemes.contains(&Scheme::MsInterp)
                }
                _ => scenario.schemes.contains(&scheme),
            };
            if !wanted {
                continue;
            }
            let mut points = Vec::new();
            for &k in &sensor_counts {
                let config = match config_for(&scenario.config, scenario.config.bs_antennas, n, k) {
                    Ok(config) => config,
                    Err(err) => {
                        notes.push(format!("skipped K={k}, N={n}: {err}"));
                        continue;
                    }
                };
                let (report, gap, delta) = match scheme {
                    Scheme::Fp => (crb_fp(&config)?, Cell::Text(String::new()), Cell::Text(String::new())),
                    _ => {
                        let report = crb_ms_opt(&config)?;
                        let gap = reduction_gap_db(&config)?;
                        // Same K without grouping: K single-sensor groups.
                        let delta = match config_for(
                            &SystemConfig { per_group: 1, ..config.clone() },
                            config.bs_antennas,
                            n,
                            k,
                        ) {
                            Ok(ungrouped) => {
                                Cell::Float(report.crb_db - crb_ms_opt(&ungrouped)?.crb_db)
                            }
                            Err(_) => Cell::Text(String::new()),
                        };
                        (report, Cell::Float(gap), delta)
                    }
                };
                table.push(vec![
                    k.into(),
                    scheme.label().into(),
                    n.into(),
                    report.crb_db.into(),
                    gap,
                    delta,
                ]);
                points.push((k as f64, report.crb_db));
            }
            if !points.is_empty() {
                series.push(Series { name: format!("{}, N={n}", scheme.label()), points });
            }
        }
    }
    if table.rows.is_empty() {
        return Err(Error::Domain("no feasible sweep point in this scenario".into()));
    }
    let plots = vec![PlotSpec {
        file_stem: table.name.clone(),
        title: "CRB vs sensor count".into(),
        x_label: "K".into(),
        y_label: "CRB (dB)".into(),
        series,
    }];
    Ok(RunOutput { tables: vec![table], plots, notes })
}

/// MUSIC beampatterns for the selected schemes: summary table plus the full
/// peak-normalized spectra.
pub fn run_beampattern(scenario: &Scenario, grid_step_deg: f64) -> Result<RunOutput> {
    let config = &scenario.config;
    let theta_deg = config.theta.to_degrees();
    let grid = AngleGrid::new(theta_deg - 20.0, theta_deg + 20.0, grid_step_deg)?;
    let ms_layout = optimal_positions(
        config.aperture,
        config.per_group,
        config.groups,
        config.min_spacing,
        PlacementVariant::LeftHeavy,
    )?;
    let fp = fp_positions(config.sensor_count(), config.wavelength)?;

    let mut summary = Table::new(
        &format!("{}_beampattern", scenario.name),
        &["scheme", "peak_deg", "width_3db_deg"],
    );
    let mut spectra_columns = vec!["angle_deg".to_string()];
    let mut spectra_values: Vec<Vec<f64>> = Vec::new();
    let mut angles: Option<Vec<f64>> = None;
    let mut series = Vec::new();
    let mut notes = Vec::new();
    for &scheme in &scenario.schemes {
        let (positions, pipeline) = match scheme {
            Scheme::Fp => (fp.as_slice(), Pipeline::Direct),
            Scheme::Ms => (ms_layout.positions.as_slice(), Pipeline::Direct),
            Scheme::MsInterp => (ms_layout.positions.as_slice(), Pipeline::Interpolated),
        };
        let spectrum = match beampattern(
            config,
            positions,
            pipeline,
            &grid,
            scenario.seed,
            scenario.beampattern_snr_boost_db,
        ) {
            Ok(spectrum) => spectrum,
            Err(err) => {
                notes.push(format!("skipped {}: {err}", scheme.label()));
                continue;
            }
        };
        let width = spectrum.lobe_width_deg(3.0);
        summary.push(vec![
            scheme.label().into(),
            spectrum.peak_angle_deg.into(),
            match &width {
                Ok(w) => Cell::Float(*w),
                Err(_) => Cell::Text(String::new()),
            },
        ]);
        if let Err(err) = width {
            notes.push(format!("{}: no -3 dB crossing ({err})", scheme.label()));
        }
        angles.get_or_insert_with(|| spectrum.angles_deg.clone());
        spectra_columns.push(format!("{}_db", scheme.label()));
        series.push(Series {
            name: scheme.label().into(),
            points: spectrum
                .angles_deg
                .iter()
                .copied()
                .zip(spectrum.values.iter().copied())
                .collect(),
        });
        spectra_values.push(spectrum.values);
    }
    if summary.rows.is_empty() {
        return Err(Error::Domain("every requested beampattern failed".into()));
    }

    let angles = angles.unwrap();
    let column_refs: Vec<&str> = spectra_columns.iter().map(String::as_str).collect();
    let mut spectra =
        Table::new(&format!("{}_beampattern_spectra", scenario.name), &column_refs);
    for (i, &angle) in angles.iter().enumerate() {
        let mut row: Vec<Cell> = vec![angle.into()];
        for values in &spectra_values {
            row.push(values[i].into());
        }
        spectra.push(row);
    }
    let plots = vec![PlotSpec {
        file_stem: spectra.name.clone(),
        title: "MUSIC beampatterns".into(),
        x_label: "DoA (deg)".into(),
        y_label: "normalized spectrum (dB)".into(),
        series,
    }];
    Ok(RunOutput { tables: vec![summary, spectra], plots, notes })
}

/// Optimal placement report: closed-form positions and variance for each
/// variant, certified against the brute-force oracle when tractable.
pub fn run_placement_report(scenario: &Scenario) -> Result<RunOutput> {
    let config = &scenario.config;
    let mut table = Table::new(
        &format!("{}_placement", scenario.name),
        &["variant", "positions_m", "variance_closed_m2", "variance_brute_m2", "agrees"],
    );
    let mut notes = Vec::new();
    let variants: &[PlacementVariant] = if config.groups % 2 == 1 {
        &[PlacementVariant::LeftHeavy, PlacementVariant::RightHeavy]
    } else {
        &[PlacementVariant::LeftHeavy]
    };
    let brute = match brute_force_optimal(
        config.aperture,
        config.per_group,
        config.groups,
        config.min_spacing,
        config.min_spacing,
    ) {
        Ok((_, variance)) => Some(variance),
        Err(err) => {
            notes.push(format!("brute-force oracle unavailable: {err}"));
            None
        }
    };
    for &variant in variants {
        let layout = optimal_positions(
            config.aperture,
            config.per_group,
            config.groups,
            config.min_spacing,
            variant,
        )?;
        let variance = layout.variance()?;
        let positions: Vec<String> = layout.positions.iter().map(|x| x.to_string()).collect();
        let (brute_cell, agrees) = match brute {
            Some(b) => (
                Cell::Float(b),
                Cell::Text(if (b - variance).abs() <= 1e-12 { "yes".into() } else { "no".into() }),
            ),
            None => (Cell::Text(String::new()), Cell::Text("n/a".into())),
        };
        table.push(vec![
            Cell::Text(format!("{variant:?}")),
            Cell::Text(positions.join(";")),
            variance.into(),
            brute_cell,
            agrees,
        ]);
    }
    Ok(RunOutput { tables: vec![table], plots: Vec::new(), notes })
}

/// Budget-constrained group-count search report.
pub fn run_budget_report(scenario: &Scenario) -> Result<RunOutput> {
    let result = budget_optimal_groups(&scenario.budget, &scenario.config)?;
    let mut table = Table::new(
        &format!("{}_budget", scenario.name),
        &["l", "n", "objective", "crb_db", "best"],
    );
    let mut series = vec![Series { name: "CRB at budget".into(), points: Vec::new() }];
    for row in &result.rows {
        let best = row.groups == result.best_groups;
        table.push(vec![
            row.groups.into(),
            row.irs_elements.into(),
            row.objective.into(),
            row.crb_db.into(),
            (best as usize).into(),
        ]);
        series[0].points.push((row.groups as f64, row.crb_db));
    }
    let notes = vec![
        format!(
            "best: L={}, N={}, CRB {} dB at P0 {} dBm",
            result.best_groups,
            result.best_elements,
            result.report.crb_db,
            watts_to_dbm(scenario.config.power)
        ),
        format!("odd stationary polynomial real roots: {:?}", result.odd_poly_roots),
        format!("even stationary polynomial real roots: {:?}", result.even_poly_roots),
    ];
    let plots = vec![PlotSpec {
        file_stem: table.name.clone(),
        title: "CRB vs group count under budget".into(),
        x_label: "L".into(),
        y_label: "CRB (dB)".into(),
        series,
    }];
    Ok(RunOutput { tables: vec![table], plots, notes })
}
