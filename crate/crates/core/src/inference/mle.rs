use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::root::{illinois, Tolerance};
use crate::density::{g_sigma, log_normalizer, mean_homozygosity, neutral_log_density, PoolConfig, Proposal, WeightedPool};
use crate::error::{invalid, Result};
use crate::model::{Homozygosity, MutationParams, SelectionModel, SimplexPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MleStatus {
    Converged,
    /// `h` at or below the smallest pool homozygosity: the likelihood keeps
    /// growing as `sigma -> +inf`.
    UnboundedAbove,
    /// `h` at or above the largest pool homozygosity: `sigma -> -inf`.
    UnboundedBelow,
    /// A finite root exists on the pool but lies beyond the search range.
    OutsidePoolRange,
}

impl MleStatus {
    pub fn is_unbounded(self) -> bool {
        matches!(self, MleStatus::UnboundedAbove | MleStatus::UnboundedBelow)
    }
}

/// Non-finite reals are written as the strings `"inf"` / `"-inf"` / `"nan"`.
pub(crate) mod real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }

    pub mod pair {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        struct Pair(#[serde(with = "super")] f64, #[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
            Pair(v.0, v.1).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(f64, f64), D::Error> {
            let Pair(a, b) = Pair::deserialize(d)?;
            Ok((a, b))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    /// `+inf` / `-inf` for the unbounded statuses; the range bound for
    /// `OutsidePoolRange`.
    #[serde(with = "real")]
    pub sigma_hat: f64,
    pub theta_hat: Option<f64>,
    pub status: MleStatus,
    /// `g(sigma_hat) - h`.
    pub score_at_solution: f64,
    #[serde(with = "real::pair")]
    pub bracket: (f64, f64),
    pub ess_at_solution: f64,
    /// Maximized log-likelihood, for joint fits.
    pub log_likelihood: Option<f64>,
    /// Joint fits only: false when the profile optimum sits on a bound of
    /// the theta range.
    pub outer_converged: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleConfig {
    pub sigma_range: (f64, f64),
    /// Distance from the extreme pool homozygosities treated as singular.
    pub margin: f64,
    pub sigma_tolerance: f64,
    pub score_tolerance: f64,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            sigma_range: (-1e4, 1e5),
            margin: 1e-12,
            sigma_tolerance: 1e-6,
            score_tolerance: 1e-8,
        }
    }
}

impl MleConfig {
    fn tolerance(&self) -> Tolerance {
        Tolerance {
            x: self.sigma_tolerance,
            f: self.score_tolerance,
            max_iterations: 400,
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.sigma_range;
        if !(lo.is_finite() && hi.is_finite() && lo < 0.0 && hi > 0.0) {
            return Err(invalid("sigma range must be finite and contain 0"));
        }
        Ok(())
    }
}

fn singular(h: f64, pool: &WeightedPool, config: &MleConfig) -> Option<MleResult> {
    let (lo, hi) = config.sigma_range;
    let (status, sigma_hat, edge, bracket) = if h <= pool.min_homozygosity() + config.margin {
        (MleStatus::UnboundedAbove, f64::INFINITY, hi, (hi, f64::INFINITY))
    } else if h >= pool.max_homozygosity() - config.margin {
        (MleStatus::UnboundedBelow, f64::NEG_INFINITY, lo, (f64::NEG_INFINITY, lo))
    } else {
        return None;
    };
    let g = g_sigma(pool, edge);
    Some(MleResult {
        sigma_hat,
        theta_hat: None,
        status,
        score_at_solution: g.value - h,
        bracket,
        ess_at_solution: g.ess.ess,
        log_likelihood: None,
        outer_converged: None,
    })
}

fn finish(pool: &WeightedPool, h: f64, sigma: f64, bracket: (f64, f64), status: MleStatus) -> MleResult {
    let g = g_sigma(pool, sigma);
    MleResult {
        sigma_hat: sigma,
        theta_hat: None,
        status,
        score_at_solution: g.value - h,
        bracket,
        ess_at_solution: g.ess.ess,
        log_likelihood: None,
        outer_converged: None,
    }
}

/// Conditional MLE of `sigma`: the root of `g(sigma) = h` on the pool's
/// exactly decreasing empirical `g`.
pub fn mle_sigma(h: Homozygosity, pool: &WeightedPool) -> MleResult {
    mle_sigma_with(h, pool, &MleConfig::default()).expect("default config is valid")
}

pub fn mle_sigma_with(h: Homozygosity, pool: &WeightedPool, config: &MleConfig) -> Result<MleResult> {
    config.validate()?;
    let h = h.value();
    if let Some(r) = singular(h, pool, config) {
        return Ok(r);
    }
    let f = |s: f64| mean_homozygosity(pool, s) - h;
    let f0 = f(0.0);
    if f0 == 0.0 {
        return Ok(finish(pool, h, 0.0, (0.0, 0.0), MleStatus::Converged));
    }
    // expand geometrically away from 0 toward the sign change
    let (limit, dir) = if f0 > 0.0 { (config.sigma_range.1, 1.0) } else { (config.sigma_range.0, -1.0) };
    let (mut near, mut f_near) = (0.0, f0);
    let mut step: f64 = 1.0;
    let (far, f_far) = loop {
        let candidate = (dir * step).clamp(config.sigma_range.0, config.sigma_range.1);
        let fc = f(candidate);
        if fc.signum() != f0.signum() || fc == 0.0 {
            break (candidate, fc);
        }
        if candidate == limit {
            let bracket = if dir > 0.0 { (limit, f64::INFINITY) } else { (f64::NEG_INFINITY, limit) };
            return Ok(finish(pool, h, limit, bracket, MleStatus::OutsidePoolRange));
        }
        near = candidate;
        f_near = fc;
        step *= 4.0;
    };
    let (lo, hi, flo, fhi) = if near < far { (near, far, f_near, f_far) } else { (far, near, f_far, f_near) };
    let root = illinois(f, lo, hi, flo, fhi, config.tolerance());
    Ok(finish(pool, h, root.x, root.bracket, MleStatus::Converged))
}

/// Batch inversion of `g` on one pool: `g` is tabulated once on a sinh-spaced
/// grid over the search range, then each query is solved inside its grid
/// cell.
pub struct SigmaInverter<'a> {
    pool: &'a WeightedPool,
    config: MleConfig,
    grid: Vec<f64>,
    g: Vec<f64>,
}

impl<'a> SigmaInverter<'a> {
    pub fn new(pool: &'a WeightedPool, config: MleConfig, points: usize) -> Result<Self> {
        config.validate()?;
        let points = points.max(3);
        let (lo, hi) = config.sigma_range;
        let (tlo, thi) = (lo.asinh(), hi.asinh());
        let mut grid: Vec<f64> = (0..points)
            .map(|j| (tlo + (thi - tlo) * j as f64 / (points - 1) as f64).sinh())
            .collect();
        grid[0] = lo;
        grid[points - 1] = hi;
        if let Err(pos) = grid.binary_search_by(|v| v.total_cmp(&0.0)) {
            grid.insert(pos, 0.0);
        }
        let g = grid.par_iter().map(|&s| mean_homozygosity(pool, s)).collect();
        Ok(Self { pool, config, grid, g })
    }

    pub fn pool(&self) -> &WeightedPool {
        self.pool
    }

    pub fn invert(&self, h: Homozygosity) -> MleResult {
        let h = h.value();
        if let Some(r) = singular(h, self.pool, &self.config) {
            return r;
        }
        let last = self.grid.len() - 1;
        if h > self.g[0] {
            return finish(self.pool, h, self.grid[0], (f64::NEG_INFINITY, self.grid[0]), MleStatus::OutsidePoolRange);
        }
        if h < self.g[last] {
            return finish(self.pool, h, self.grid[last], (self.grid[last], f64::INFINITY), MleStatus::OutsidePoolRange);
        }
        // g is non-increasing along the grid: first index with g <= h
        let j = self.g.partition_point(|&v| v > h).clamp(1, last);
        let (lo, hi) = (self.grid[j - 1], self.grid[j]);
        let f = |s: f64| mean_homozygosity(self.pool, s) - h;
        let root = illinois(f, lo, hi, self.g[j - 1] - h, self.g[j] - h, self.config.tolerance());
        finish(self.pool, h, root.x, root.bracket, MleStatus::Converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointConfig {
    pub theta_range: (f64, f64),
    pub theta_tolerance: f64,
    /// Log-spaced scan preceding the golden-section search.
    pub scan_points: usize,
    pub pool_size: usize,
    pub mle: MleConfig,
}

impl Default for JointConfig {
    fn default() -> Self {
        Self {
            theta_range: (0.1, 50.0),
            theta_tolerance: 1e-3,
            scan_points: 25,
            pool_size: 1_000_000,
            mle: MleConfig::default(),
        }
    }
}

/// One point of the profile likelihood in `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub theta: f64,
    pub fit: MleResult,
}

/// Profile log-likelihood at `theta`: the conditional MLE of `sigma` on a
/// pool built at `theta` from `seed`, and the log-likelihood there.
pub fn profile_point(x: &SimplexPoint, theta: f64, seed: u64, config: &JointConfig) -> Result<ProfilePoint> {
    let params = MutationParams::symmetric(theta, x.k())?;
    let pool_cfg = PoolConfig::with_size(config.pool_size)
        .proposal(Proposal::defensive(&params))
        .retain_draws(false);
    let pool = WeightedPool::build(&params, &pool_cfg, seed)?;
    let mut fit = mle_sigma_with(x.homozygosity(), &pool, &config.mle)?;
    fit.theta_hat = Some(theta);
    if !fit.status.is_unbounded() {
        let h = x.homozygosity().value();
        let log_z = log_normalizer(&pool, &SelectionModel::symmetric(fit.sigma_hat))?.value;
        fit.log_likelihood = Some(-fit.sigma_hat * h - log_z + neutral_log_density(x, &params)?);
    }
    Ok(ProfilePoint { theta, fit })
}

fn profile_value(p: &ProfilePoint) -> f64 {
    if p.fit.status.is_unbounded() {
        f64::INFINITY
    } else {
        p.fit.log_likelihood.unwrap_or(f64::NEG_INFINITY)
    }
}

/// Joint MLE of `(theta, sigma)` by golden-section search over the profile
/// likelihood in `theta`, after a log-spaced scan to locate the basin.
/// Every profile evaluation rebuilds its pool from the same seed, so the
/// profile is a deterministic function of `theta`.
///
/// If the data are singular for some pool on the scan (the likelihood is
/// unbounded there), that fit is returned as is.
pub fn mle_joint(x: &SimplexPoint, seed: u64, config: &JointConfig) -> Result<MleResult> {
    let (tlo, thi) = config.theta_range;
    if !(tlo > 0.0 && thi > tlo && thi.is_finite()) {
        return Err(invalid("theta range must satisfy 0 < lo < hi"));
    }
    let points = config.scan_points.max(3);
    let scan: Vec<f64> = (0..points)
        .map(|j| (tlo.ln() + (thi / tlo).ln() * j as f64 / (points - 1) as f64).exp())
        .collect();
    let profile: Vec<ProfilePoint> = scan
        .iter()
        .map(|&t| profile_point(x, t, seed, config))
        .collect::<Result<_>>()?;
    if let Some(p) = profile.iter().find(|p| p.fit.status.is_unbounded()) {
        let mut fit = p.fit.clone();
        fit.outer_converged = Some(false);
        return Ok(fit);
    }
    let best = (0..points)
        .max_by(|&a, &b| profile_value(&profile[a]).total_cmp(&profile_value(&profile[b])))
        .expect("non-empty scan");

    let (mut a, mut b) = (scan[best.saturating_sub(1)], scan[(best + 1).min(points - 1)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64| profile_point(x, t, seed, config);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut pc = eval(c)?;
    let mut pd = eval(d)?;
    let mut champion = profile[best].clone();
    while b - a > config.theta_tolerance {
        if profile_value(&pc) >= profile_value(&pd) {
            b = d;
            d = c;
            pd = pc;
            c = b - inv_phi * (b - a);
            pc = eval(c)?;
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + inv_phi * (b - a);
            pd = eval(d)?;
        }
    }
    for p in [pc, pd] {
        if profile_value(&p) > profile_value(&champion) {
            champion = p;
        }
    }
    let mut fit = champion.fit;
    let t = champion.theta;
    let at_bound = (t - tlo).abs() <= 2.0 * config.theta_tolerance || (thi - t).abs() <= 2.0 * config.theta_tolerance;
    fit.outer_converged = Some(!at_bound);
    Ok(fit)
}
