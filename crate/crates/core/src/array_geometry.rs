//! Grouped movable-sensor layouts on a 1D segment.
//!
//! Sensors move in `L` rigid groups of `per_group` elements each along a
//! segment of length `aperture`. The placement objective is the positional
//! variance of the flattened sensor coordinates: the DoA CRB is inversely
//! proportional to it, so maximizing variance minimizes the bound. The
//! optimal layout packs half the groups against each end of the segment at
//! minimum spacing; [`closed_form_variance`] gives the resulting variance
//! without materializing positions, and [`brute_force_optimal`] certifies
//! the closed form by exhaustive grid search over group offsets.

use crate::error::{ConstraintViolation, Error, Result};
use serde::{Deserialize, Serialize};

/// Slack for floating-point constraint checks, scaled by the aperture.
const GEOM_TOL: f64 = 1e-9;

/// Selects which end carries the extra group when `L` is odd.
///
/// The two variants are reflections of each other and achieve the same
/// variance; for even `L` they produce identical layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlacementVariant {
    LeftHeavy,
    RightHeavy,
}

/// Positions of all grouped movable sensors on the segment `[0, aperture]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    /// Flattened sensor coordinates in meters, non-decreasing.
    pub positions: Vec<f64>,
    /// Number of groups `L`.
    pub groups: usize,
    /// Sensors per group.
    pub per_group: usize,
    /// Minimum inter-sensor spacing in meters.
    pub min_spacing: f64,
    /// Segment length `D` in meters.
    pub aperture: f64,
}

impl SensorLayout {
    pub fn new(
        positions: Vec<f64>,
        groups: usize,
        per_group: usize,
        min_spacing: f64,
        aperture: f64,
    ) -> Self {
        Self { positions, groups, per_group, min_spacing, aperture }
    }

    /// Total sensor count `K = L * per_group`.
    pub fn sensor_count(&self) -> usize {
        self.groups * self.per_group
    }

    /// Checks every placement constraint, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let k_total = self.sensor_count();
        let tol = GEOM_TOL * self.aperture.max(1.0);

        if k_total < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 sensors, got L={} per_group={}",
                self.groups, self.per_group
            )));
        }
        let limit = self.aperture / (k_total as f64 - 1.0);
        if self.min_spacing <= 0.0 || self.min_spacing > limit + tol {
            return Err(Error::Layout(ConstraintViolation::InfeasibleMinSpacing {
                d_min: self.min_spacing,
                limit,
            }));
        }
        if self.positions.len() != k_total {
            return Err(Error::Layout(ConstraintViolation::CountMismatch {
                expected: k_total,
                actual: self.positions.len(),
            }));
        }
        for (i, &x) in self.positions.iter().enumerate() {
            let out_of_segment = x < -tol || x > self.aperture + tol;
            let disordered = i > 0 && x < self.positions[i - 1] - tol;
            if out_of_segment || disordered {
                return Err(Error::Layout(ConstraintViolation::Bound { index: i, position: x }));
            }
        }
        // Intra-group spacing (6c) and inter-group leading-sensor spacing (6d).
        for l in 0..self.groups {
            let base = l * self.per_group;
            for k in 1..self.per_group {
                let gap = self.positions[base + k] - self.positions[base + k - 1];
                if gap < self.min_spacing - tol {
                    return Err(Error::Layout(ConstraintViolation::IntraGroupSpacing {
                        group: l,
                        gap,
                        required: self.min_spacing,
                    }));
                }
            }
            if l > 0 {
                let gap = self.positions[base] - self.positions[base - self.per_group];
                let required = self.per_group as f64 * self.min_spacing;
                if gap < required - tol {
                    return Err(Error::Layout(ConstraintViolation::InterGroupSpacing {
                        group: l,
                        gap,
                        required,
                    }));
                }
            }
        }
        Ok(())
    }

    /// Positional variance of the layout in m².
    pub fn variance(&self) -> Result<f64> {
        variance(&self.positions)
    }
}

/// Variance of a coordinate set: `(1/K) Σx² − ((1/K) Σx)²`.
///
/// Invariant under translation and reflection of the coordinates.
pub fn variance(positions: &[f64]) -> Result<f64> {
    if positions.is_empty() {
        return Err(Error::Domain("variance of an empty position set".into()));
    }
    let k = positions.len() as f64;
    let mean = positions.iter().sum::<f64>() / k;
    let mean_sq = positions.iter().map(|x| x * x).sum::<f64>() / k;
    Ok(mean_sq - mean * mean)
}

fn check_feasible(aperture: f64, per_group: usize, groups: usize, min_spacing: f64) -> Result<()> {
    if groups < 2 || per_group < 1 {
        return Err(Error::Domain(format!(
            "need L >= 2 groups and per_group >= 1, got L={groups}, per_group={per_group}"
        )));
    }
    let k = (groups * per_group) as f64;
    if min_spacing <= 0.0 {
        return Err(Error::Domain(format!("min_spacing must be positive, got {min_spacing}")));
    }
    let tol = GEOM_TOL * aperture.max(1.0);
    if aperture < (k - 1.0) * min_spacing - tol {
        return Err(Error::Domain(format!(
            "infeasible geometry: aperture {aperture} < (K-1)*d_min = {}",
            (k - 1.0) * min_spacing
        )));
    }
    Ok(())
}

/// Variance-maximizing grouped placement on `[0, aperture]`.
///
/// The first `⌊L/2⌋` groups pack left from 0 at minimum spacing and the rest
/// pack right ending at `aperture`; with `RightHeavy` and odd `L` the
/// unpaired middle group joins the left block instead (a reflection of the
/// `LeftHeavy` layout, with identical variance). For even `L` both variants
/// coincide.
pub fn optimal_positions(
    aperture: f64,
    per_group: usize,
    groups: usize,
    min_spacing: f64,
    variant: PlacementVariant,
) -> Result<SensorLayout> {
    check_feasible(aperture, per_group, groups, min_spacing)?;
    let k_total = groups * per_group;
    let split = match variant {
        PlacementVariant::LeftHeavy => groups / 2,
        PlacementVariant::RightHeavy if groups % 2 == 1 => groups / 2 + 1,
        PlacementVariant::RightHeavy => groups / 2,
    };
    let mut positions = Vec::with_capacity(k_total);
    for l in 1..=groups {
        for k in 1..=per_group {
            let x = if l <= split {
                ((per_group * (l - 1) + k - 1) as f64) * min_spacing
            } else {
                aperture - ((k_total - per_group * (l - 1) - k) as f64) * min_spacing
            };
            positions.push(x);
        }
    }
    let layout = SensorLayout::new(positions, groups, per_group, min_spacing, aperture);
    layout.validate()?;
    Ok(layout)
}

/// Variance of the optimal placement, evaluated without building positions.
///
/// Branches on the parity of the group count; `K = L * per_group`.
pub fn closed_form_variance(
    aperture: f64,
    per_group: usize,
    groups: usize,
    min_spacing: f64,
) -> Result<f64> {
    check_feasible(aperture, per_group, groups, min_spacing)?;
    let d = aperture;
    let dm = min_spacing;
    let kb = per_group as f64;
    let l = groups as f64;
    let k = kb * l;
    if groups % 2 == 1 {
        Ok(kb / (12.0 * k * k)
            * (3.0 * (k * l - kb) * d * d
                - 3.0 * (k - 2.0) * (k * l - kb) * d * dm
                + (k - 1.0) * (l * k * k - 2.0 * l * k + 3.0 * kb) * dm * dm))
    } else {
        Ok((3.0 * d * d
            - 3.0 * (kb * l - 2.0) * d * dm
            + (kb * kb * l * l - 3.0 * kb * l + 2.0) * dm * dm)
            / 12.0)
    }
}

/// Hard cap on the number of group-offset tuples the oracle will enumerate.
const MAX_CANDIDATES: u128 = 10_000_000;

fn is_grid_multiple(value: f64, step: f64) -> bool {
    let ratio = value / step;
    (ratio - ratio.round()).abs() <= 1e-12 * ratio.abs().max(1.0)
}

/// Exhaustive search over group left-edge offsets on a uniform grid.
///
/// Intra-group spacing is fixed at `min_spacing`, mirroring the variable
/// structure of the reduced placement problem, so only the `L` group offsets
/// are free. Ties are broken toward the lexicographically smallest offset
/// tuple. Refuses searches whose candidate count exceeds 10^7, suggesting a
/// coarser step.
pub fn brute_force_optimal(
    aperture: f64,
    per_group: usize,
    groups: usize,
    min_spacing: f64,
    grid_step: f64,
) -> Result<(SensorLayout, f64)> {
    check_feasible(aperture, per_group, groups, min_spacing)?;
    if grid_step <= 0.0 {
        return Err(Error::Domain(format!("grid_step must be positive, got {grid_step}")));
    }
    if !is_grid_multiple(min_spacing, grid_step) || !is_grid_multiple(aperture, grid_step) {
        return Err(Error::Domain(format!(
            "grid_step {grid_step} must divide both d_min {min_spacing} and aperture {aperture}"
        )));
    }

    // Work in integer grid units to keep enumeration exact.
    let total_steps = (aperture / grid_step).round() as i64;
    let dmin_steps = (min_spacing / grid_step).round() as i64;
    let group_extent = dmin_steps * (per_group as i64 - 1);
    let group_pitch = dmin_steps * per_group as i64;

    // Candidate-count bound: offsets reduce to a combination problem after
    // subtracting the mandatory inter-group pitch.
    let free = total_steps - group_extent - group_pitch * (groups as i64 - 1);
    if free < 0 {
        return Err(Error::Domain("no feasible layout on this grid".into()));
    }
    let n_choices = (free + 1) as u128;
    let mut candidates: u128 = 1;
    for i in 0..groups as u128 {
        candidates = candidates.saturating_mul(n_choices + i) / (i + 1);
        if candidates > MAX_CANDIDATES {
            return Err(Error::SearchSpace {
                candidates,
                suggested_step: grid_step * 2.0,
            });
        }
    }

    let mut best: Option<(Vec<i64>, f64)> = None;
    let mut offsets = vec![0i64; groups];
    search_offsets(
        0,
        0,
        total_steps,
        group_extent,
        group_pitch,
        groups,
        per_group,
        dmin_steps,
        grid_step,
        &mut offsets,
        &mut best,
    );

    let (best_offsets, best_var) =
        best.ok_or_else(|| Error::Domain("no feasible layout on this grid".into()))?;
    let mut positions = Vec::with_capacity(groups * per_group);
    for &o in &best_offsets {
        for k in 0..per_group as i64 {
            positions.push((o + k * dmin_steps) as f64 * grid_step);
        }
    }
    let layout = SensorLayout::new(positions, groups, per_group, min_spacing, aperture);
    layout.validate()?;
    Ok((layout, best_var))
}

#[allow(clippy::too_many_arguments)]
fn search_offsets(
    level: usize,
    min_offset: i64,
    total_steps: i64,
    group_extent: i64,
    group_pitch: i64,
    groups: usize,
    per_group: usize,
    dmin_steps: i64,
    grid_step: f64,
    offsets: &mut Vec<i64>,
    best: &mut Option<(Vec<i64>, f64)>,
) {
    if level == groups {
        let mut positions = Vec::with_capacity(groups * per_group);
        for &o in offsets.iter() {
            for k in 0..per_group as i64 {
                positions.push((o + k * dmin_steps) as f64 * grid_step);
            }
        }
        let var = variance(&positions).expect("non-empty by construction");
        // Lexicographic enumeration order makes strict improvement the
        // tie-break toward the smallest offset tuple.
        if best.as_ref().map_or(true, |(_, v)| var > *v + 1e-15) {
            *best = Some((offsets.clone(), var));
        }
        return;
    }
    // Leave room for the remaining groups.
    let remaining = (groups - 1 - level) as i64;
    let max_offset = total_steps - group_extent - remaining * group_pitch;
    let mut o = min_offset;
    while o <= max_offset {
        offsets[level] = o;
        search_offsets(
            level + 1,
            o + group_pitch,
            total_steps,
            group_extent,
            group_pitch,
            groups,
            per_group,
            dmin_steps,
            grid_step,
            offsets,
            best,
        );
        o += 1;
    }
}

/// Fixed-position baseline: half-wavelength uniform array `{0, λ/2, ...}`.
pub fn fp_positions(sensor_count: usize, wavelength: f64) -> Result<Vec<f64>> {
    if sensor_count < 2 {
        return Err(Error::Domain(format!("need K >= 2 sensors, got {sensor_count}")));
    }
    if wavelength <= 0.0 {
        return Err(Error::Domain(format!("wavelength must be positive, got {wavelength}")));
    }
    Ok((0..sensor_count).map(|k| k as f64 * wavelength / 2.0).collect())
}

/// Variance of the half-wavelength baseline: `λ²(K+1)(K−1)/48`.
pub fn fp_variance(sensor_count: usize, wavelength: f64) -> Result<f64> {
    if sensor_count < 2 {
        return Err(Error::Domain(format!("need K >= 2 sensors, got {sensor_count}")));
    }
    let k = sensor_count as f64;
    Ok(wavelength * wavelength * (k + 1.0) * (k - 1.0) / 48.0)
}
