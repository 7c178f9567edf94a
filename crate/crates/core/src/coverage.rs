//! Analytic Boolean-disk coverage model.
//!
//! With nodes scattered as a Poisson process of intensity `λ` and each node
//! awake a fraction `t_a/T` of the time, a point is sensed with probability
//! `1 - exp(-λ π r² t_a/T)`. Inverting that gives the minimum density for a
//! target coverage, and from the density the number of nodes that may sleep.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_TARGET_COVERAGE: f64 = 0.9;
/// Empirical average fraction of rounds a node spends awake.
pub const DEFAULT_DUTY_FRACTION: f64 = 0.53;

/// How a fractional required-node count becomes an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Drop the fractional node (138.28 -> 138). Reproduces a maxsleep of 12
    /// for the default 150-node field.
    #[default]
    Floor,
    /// Round up to a true lower bound (138.28 -> 139).
    Ceil,
}

impl Rounding {
    fn apply(self, v: f64) -> u64 {
        match self {
            Rounding::Floor => v.floor() as u64,
            Rounding::Ceil => v.ceil() as u64,
        }
    }
}

fn check_duty(duty: f64) -> Result<()> {
    if duty > 0.0 && duty <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("duty fraction must lie in (0, 1], got {duty}")))
    }
}

fn check_range(range: f64) -> Result<()> {
    if range.is_finite() && range > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("sensing range must be positive, got {range}")))
    }
}

/// Probability that a random point has at least one awake sensor within
/// `range`.
pub fn coverage_probability(density: f64, range: f64, duty: f64) -> Result<f64> {
    check_duty(duty)?;
    check_range(range)?;
    if !(density.is_finite() && density >= 0.0) {
        return Err(Error::Domain(format!("density must be nonnegative, got {density}")));
    }
    Ok(-(-density * PI * range * range * duty).exp_m1())
}

/// Minimum node density (nodes/m²) that reaches `target` coverage.
pub fn required_density(target: f64, range: f64, duty: f64) -> Result<f64> {
    check_duty(duty)?;
    check_range(range)?;
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain(format!(
            "target coverage must lie in (0, 1), got {target}"
        )));
    }
    Ok(-(-target).ln_1p() / (PI * range * range * duty))
}

pub fn required_nodes(
    field_area: f64,
    target: f64,
    range: f64,
    duty: f64,
    rounding: Rounding,
) -> Result<u64> {
    if !(field_area.is_finite() && field_area > 0.0) {
        return Err(Error::Domain(format!("field area must be positive, got {field_area}")));
    }
    Ok(rounding.apply(required_density(target, range, duty)? * field_area))
}

/// Nodes that may sleep while keeping `target` coverage, floored at zero.
pub fn max_sleep_count(
    total_nodes: u64,
    field_area: f64,
    target: f64,
    range: f64,
    duty: f64,
    rounding: Rounding,
) -> Result<u64> {
    if total_nodes == 0 {
        return Err(Error::Domain("total node count must be at least 1".into()));
    }
    let needed = required_nodes(field_area, target, range, duty, rounding)?;
    Ok(total_nodes.saturating_sub(needed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveragePlan {
    pub target_coverage: f64,
    pub sensing_range: f64,
    pub duty_fraction: f64,
    pub required_density: f64,
    pub required_nodes: u64,
    pub max_sleep: u64,
    /// Counts under the other rounding convention, for side-by-side reporting.
    pub required_nodes_floor: u64,
    pub max_sleep_floor: u64,
}

impl CoveragePlan {
    /// `required_nodes`/`max_sleep` use the conservative ceiling; the `_floor`
    /// fields carry the truncated counts.
    pub fn new(
        target: f64,
        range: f64,
        duty: f64,
        total_nodes: u64,
        field_area: f64,
    ) -> Result<Self> {
        let density = required_density(target, range, duty)?;
        let ceil = required_nodes(field_area, target, range, duty, Rounding::Ceil)?;
        let floor = required_nodes(field_area, target, range, duty, Rounding::Floor)?;
        Ok(Self {
            target_coverage: target,
            sensing_range: range,
            duty_fraction: duty,
            required_density: density,
            required_nodes: ceil,
            max_sleep: max_sleep_count(total_nodes, field_area, target, range, duty, Rounding::Ceil)?,
            required_nodes_floor: floor,
            max_sleep_floor: max_sleep_count(
                total_nodes,
                field_area,
                target,
                range,
                duty,
                Rounding::Floor,
            )?,
        })
    }
}
