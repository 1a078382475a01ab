//! Transitional region boundaries on the mean PRR curve.
//!
//! The region starts where the expected PRR drops below `upper` and ends
//! where it drops below `lower`. The size coefficient is
//! `(d_end − d_begin) / d_begin`: the region's width relative to where it
//! begins. That normalization is a convention.

use serde::Serialize;

use crate::channel::{expected_prr, DeploymentScenario};
use crate::error::{BracketEnd, Error, Result};

pub const DEFAULT_UPPER: f64 = 0.8;
pub const DEFAULT_LOWER: f64 = 0.2;
/// Absolute distance tolerance of the bisection (m).
pub const DEFAULT_TOLERANCE_M: f64 = 1e-3;
/// Bisection keeps going until the mean PRR is this close to the threshold.
pub const PRR_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionBounds {
    pub d_begin: f64,
    pub d_end: f64,
    pub upper: f64,
    pub lower: f64,
}

impl RegionBounds {
    pub fn new(d_begin: f64, d_end: f64, upper: f64, lower: f64) -> Result<Self> {
        if !(d_begin > 0.0 && d_begin <= d_end && d_end.is_finite()) {
            return Err(Error::invalid("region", "need 0 < d_begin <= d_end"));
        }
        if !(0.0 <= lower && lower <= upper && upper <= 1.0) {
            return Err(Error::invalid("thresholds", "need 0 <= lower <= upper <= 1"));
        }
        Ok(Self {
            d_begin,
            d_end,
            upper,
            lower,
        })
    }

    pub fn contains(&self, d: f64) -> bool {
        self.d_begin <= d && d <= self.d_end
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegionSearch {
    pub upper: f64,
    pub lower: f64,
    pub d_max: f64,
    pub tolerance_m: f64,
}

impl Default for RegionSearch {
    fn default() -> Self {
        Self {
            upper: DEFAULT_UPPER,
            lower: DEFAULT_LOWER,
            d_max: 1_000.0,
            tolerance_m: DEFAULT_TOLERANCE_M,
        }
    }
}

/// Locates the region with the default thresholds and options.
pub fn region_bounds(scenario: &DeploymentScenario) -> Result<RegionBounds> {
    region_bounds_with(scenario, &RegionSearch::default())
}

pub fn region_bounds_with(scenario: &DeploymentScenario, search: &RegionSearch) -> Result<RegionBounds> {
    let RegionSearch {
        upper,
        lower,
        d_max,
        tolerance_m,
    } = *search;
    if !(0.0 < lower && lower <= upper && upper < 1.0) {
        return Err(Error::invalid("thresholds", "need 0 < lower <= upper < 1"));
    }
    if !(tolerance_m > 0.0) {
        return Err(Error::invalid("tolerance_m", "must be positive"));
    }
    scenario.validate()?;
    let d0 = scenario.channel.d0_m;
    if !(d_max > d0) {
        return Err(Error::invalid(
            "d_max",
            "search limit must exceed the reference distance",
        ));
    }
    let mean = |d: f64| expected_prr(d, scenario).map(|m| m.mean);

    let near = mean(d0)?;
    if !(near > upper) {
        return Err(Error::NotBracketed {
            end: BracketEnd::Near,
            mean: near,
            threshold: upper,
        });
    }
    let far = mean(d_max)?;
    if !(far < lower) {
        return Err(Error::NotBracketed {
            end: BracketEnd::Far,
            mean: far,
            threshold: lower,
        });
    }

    let d_begin = bisect(&mean, d0, d_max, upper, tolerance_m)?;
    let d_end = bisect(&mean, d0, d_max, lower, tolerance_m)?;
    RegionBounds::new(d_begin, d_end, upper, lower)
}

/// Crossing of a decreasing function through `target` on `[lo, hi]`, given
/// `f(lo) > target > f(hi)`.
fn bisect(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, target: f64, tol: f64) -> Result<f64> {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        if hi - lo <= tol && (v - target).abs() <= PRR_TOLERANCE {
            break;
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    Ok(mid)
}

/// `(d_end − d_begin) / d_begin`.
pub fn region_coefficient(bounds: &RegionBounds) -> f64 {
    (bounds.d_end - bounds.d_begin) / bounds.d_begin
}
