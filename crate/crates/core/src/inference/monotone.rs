use serde::{Deserialize, Serialize};

use super::interval::{check_alphas, IntervalEstimate, IntervalMethod};
use super::root::{illinois, Tolerance};
use crate::density::{cdf_homozygosity, WeightedPool};
use crate::error::{invalid, Result};
use crate::model::Homozygosity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneConfig {
    pub sigma_range: (f64, f64),
    pub sigma_tolerance: f64,
}

impl Default for MonotoneConfig {
    fn default() -> Self {
        Self {
            sigma_range: (-500.0, 2000.0),
            sigma_tolerance: 1e-6,
        }
    }
}

/// Exact interval for `sigma` at fixed `theta` from the homozygosity CDF,
/// which increases in `sigma`: `F(h | lower) = alpha1` and
/// `F(h | upper) = 1 - alpha2`.
pub fn monotone_ci(h: Homozygosity, pool: &WeightedPool, alpha1: f64, alpha2: f64) -> Result<IntervalEstimate> {
    monotone_ci_with(h, pool, alpha1, alpha2, &MonotoneConfig::default())
}

pub fn monotone_ci_with(
    h: Homozygosity,
    pool: &WeightedPool,
    alpha1: f64,
    alpha2: f64,
    config: &MonotoneConfig,
) -> Result<IntervalEstimate> {
    check_alphas(alpha1, alpha2)?;
    let (lo, hi) = config.sigma_range;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(invalid("sigma search range must be finite and increasing"));
    }
    let cdf = |s: f64| cdf_homozygosity(pool, s, h).value;
    let (f_lo, f_hi) = (cdf(lo), cdf(hi));
    let tol = Tolerance {
        x: config.sigma_tolerance,
        f: 0.0,
        max_iterations: 400,
    };
    let mut advisories = Vec::new();
    let mut solve = |target: f64, name: &str| {
        if f_lo >= target {
            advisories.push(format!(
                "{name} endpoint at the lower search bound {lo}: F = {f_lo:.4} already exceeds {target}; widen the range"
            ));
            lo
        } else if f_hi <= target {
            advisories.push(format!(
                "{name} endpoint at the upper search bound {hi}: F = {f_hi:.4} stays below {target}; widen the range"
            ));
            hi
        } else {
            illinois(|s| cdf(s) - target, lo, hi, f_lo - target, f_hi - target, tol).x
        }
    };
    let lower = solve(alpha1, "lower");
    let upper = solve(1.0 - alpha2, "upper");
    Ok(IntervalEstimate {
        lower,
        upper: upper.max(lower),
        level: 1.0 - alpha1 - alpha2,
        method: IntervalMethod::MonotoneExact,
        alpha_split: (alpha1, alpha2),
        advisories,
    })
}
