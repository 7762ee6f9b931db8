use serde::{Deserialize, Serialize};

use super::mle::real;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    BootstrapPercentile,
    MonotoneExact,
    Credible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    #[serde(with = "real")]
    pub lower: f64,
    #[serde(with = "real")]
    pub upper: f64,
    pub level: f64,
    pub method: IntervalMethod,
    pub alpha_split: (f64, f64),
    /// Conditions a reader should know about, e.g. an endpoint pinned to the
    /// search range.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub advisories: Vec<String>,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

pub(crate) fn check_alphas(alpha1: f64, alpha2: f64) -> Result<()> {
    if !(alpha1 >= 0.0 && alpha2 >= 0.0 && alpha1 + alpha2 > 0.0 && alpha1 + alpha2 < 1.0 + 1e-12) {
        return Err(invalid(format!("need 0 < alpha1 + alpha2 < 1, got {alpha1} + {alpha2}")));
    }
    Ok(())
}

/// Linear-interpolation quantile of sorted data that may hold infinities.
/// Interpolating toward an infinite neighbour yields that infinity.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    let (a, b) = (sorted[lo], sorted[hi]);
    if frac == 0.0 || a == b {
        a
    } else if b == f64::INFINITY {
        b
    } else if a == f64::NEG_INFINITY {
        a
    } else {
        a + frac * (b - a)
    }
}

/// Equal-tailed interval from raw values.
pub(crate) fn percentile_interval(values: &[f64], level: f64, method: IntervalMethod) -> Result<IntervalEstimate> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("level must lie in (0, 1), got {level}")));
    }
    if values.is_empty() {
        return Err(invalid("no values to summarize"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok(IntervalEstimate {
        lower: quantile_sorted(&v, alpha),
        upper: quantile_sorted(&v, 1.0 - alpha),
        level,
        method,
        alpha_split: (alpha, alpha),
        advisories: Vec::new(),
    })
}
