use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::{percentile_interval, IntervalEstimate, IntervalMethod};
use super::mle::{mle_joint, JointConfig, MleConfig, MleResult, MleStatus, SigmaInverter};
use crate::density::{PoolConfig, Proposal, WeightedPool};
use crate::error::{invalid, Result};
use crate::model::MutationParams;
use crate::sampler::{sample_selection, SamplerConfig, SamplerReport};
use crate::stream::{substream, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub level: f64,
    pub pool_size: usize,
    /// Points in the cached `g` table used to invert each replicate.
    pub inverter_points: usize,
    /// Re-estimate `theta` for every replicate instead of conditioning on
    /// the generating value.
    pub joint: bool,
    pub joint_config: JointConfig,
    pub mle: MleConfig,
    pub sampler: SamplerConfig,
    /// Share of unbounded replicates beyond which the standard error is
    /// flagged as undefined.
    pub unbounded_share_limit: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            level: 0.95,
            pool_size: 100_000,
            inverter_points: 2_000,
            joint: false,
            joint_config: JointConfig {
                pool_size: 20_000,
                scan_points: 12,
                theta_tolerance: 1e-2,
                ..JointConfig::default()
            },
            mle: MleConfig::default(),
            sampler: SamplerConfig::default(),
            unbounded_share_limit: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub theta: f64,
    pub sigma: f64,
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub estimates: Vec<MleResult>,
    /// Over converged replicates only; `nan` when none converged.
    #[serde(with = "super::mle::real")]
    pub standard_error: f64,
    /// More than the configured share of replicates were unbounded, so the
    /// sampling distribution has no usable second moment.
    pub standard_error_undefined: bool,
    pub percentile_interval: IntervalEstimate,
    pub n_unbounded: usize,
    pub n_outside_range: usize,
    pub generator_params: GeneratorParams,
    pub joint: bool,
    pub sampler: SamplerReport,
}

impl BootstrapResult {
    /// Replicate estimates with unbounded ones as `+inf` / `-inf`.
    pub fn sigma_hats(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.sigma_hat).collect()
    }
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Parametric bootstrap of the MLE of `sigma`: `m` populations drawn at
/// `(theta, sigma)`, each re-fitted.
pub fn bootstrap(theta: f64, sigma: f64, k: usize, m: usize, seed: u64, config: &BootstrapConfig) -> Result<BootstrapResult> {
    if m < 100 {
        return Err(invalid(format!("bootstrap needs m >= 100 replicates, got {m}")));
    }
    let params = MutationParams::symmetric(theta, k)?;
    let (datasets, report) = sample_selection(&params, sigma, m, substream(seed, Stream::Bootstrap, 0), &config.sampler)?;

    let estimates: Vec<MleResult> = if config.joint {
        let fit_seed = substream(seed, Stream::Bootstrap, 2);
        datasets
            .par_iter()
            .map(|x| mle_joint(x, fit_seed, &config.joint_config))
            .collect::<Result<_>>()?
    } else {
        let pool_cfg = PoolConfig::with_size(config.pool_size)
            .proposal(Proposal::defensive(&params))
            .retain_draws(false);
        let pool = WeightedPool::build(&params, &pool_cfg, substream(seed, Stream::Bootstrap, 1))?;
        let inverter = SigmaInverter::new(&pool, config.mle, config.inverter_points)?;
        datasets
            .par_iter()
            .map(|x| {
                let mut fit = inverter.invert(x.homozygosity());
                fit.theta_hat = Some(theta);
                fit
            })
            .collect()
    };

    let n_unbounded = estimates.iter().filter(|e| e.status.is_unbounded()).count();
    let n_outside_range = estimates.iter().filter(|e| e.status == MleStatus::OutsidePoolRange).count();
    let converged: Vec<f64> = estimates
        .iter()
        .filter(|e| e.status == MleStatus::Converged)
        .map(|e| e.sigma_hat)
        .collect();
    let all: Vec<f64> = estimates.iter().map(|e| e.sigma_hat).collect();
    let mut interval = percentile_interval(&all, config.level, IntervalMethod::BootstrapPercentile)?;
    if n_unbounded > 0 {
        interval
            .advisories
            .push(format!("{n_unbounded} of {m} replicates have an unbounded likelihood"));
    }
    Ok(BootstrapResult {
        standard_error: std_dev(&converged),
        standard_error_undefined: n_unbounded as f64 > config.unbounded_share_limit * m as f64,
        percentile_interval: interval,
        estimates,
        n_unbounded,
        n_outside_range,
        generator_params: GeneratorParams { theta, sigma, k, seed },
        joint: config.joint,
        sampler: report,
    })
}
