use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::interval::{percentile_interval, IntervalEstimate, IntervalMethod};
use super::mle::{mle_joint, mle_sigma_with, JointConfig, MleConfig, MleResult, MleStatus};
use crate::density::{var_homozygosity, PoolConfig, Proposal, WeightedPool};
use crate::error::{invalid, Result};
use crate::model::{MutationParams, SimplexPoint};
use crate::stream::{dirichlet_log_density, rng_for, substream, Stream};

/// Independent uniform priors. The theta interval is open at its lower end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorBounds {
    pub theta: (f64, f64),
    pub sigma: (f64, f64),
}

impl Default for PriorBounds {
    fn default() -> Self {
        Self {
            theta: (0.0, 50.0),
            sigma: (-100.0, 1000.0),
        }
    }
}

impl PriorBounds {
    pub fn validate(&self) -> Result<()> {
        let (tl, th) = self.theta;
        let (sl, sh) = self.sigma;
        if !(tl >= 0.0 && th > tl && th.is_finite()) {
            return Err(invalid(format!("theta prior bounds must satisfy 0 <= lo < hi < inf, got ({tl}, {th})")));
        }
        if !(sl < sh && sl.is_finite() && sh.is_finite()) {
            return Err(invalid(format!("sigma prior bounds must be finite and increasing, got ({sl}, {sh})")));
        }
        Ok(())
    }

    pub fn contains(&self, theta: f64, sigma: f64) -> bool {
        self.theta.0 < theta && theta <= self.theta.1 && self.sigma.0 <= sigma && sigma <= self.sigma.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PosteriorMode {
    Joint,
    FixedTheta { theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorConfig {
    pub mode: PosteriorMode,
    pub burn_in: usize,
    pub pool_size: usize,
    /// Laplace scale of the sigma proposal, in units of the pilot Wald
    /// bracket width.
    pub sigma_scale_factor: f64,
    pub pilot_scan_points: usize,
    /// Acceptance rates below this mark the chain as mistuned.
    pub min_acceptance: f64,
}

impl Default for PosteriorConfig {
    fn default() -> Self {
        Self {
            mode: PosteriorMode::Joint,
            burn_in: 1_000,
            pool_size: 20_000,
            sigma_scale_factor: 2.0,
            pilot_scan_points: 25,
            min_acceptance: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaProposal {
    Uniform { lo: f64, hi: f64 },
    Fixed { theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalSpec {
    pub theta: ThetaProposal,
    /// Laplace proposal for sigma, truncated to the prior interval.
    pub sigma_center: f64,
    pub sigma_scale: f64,
    pub pool: Proposal,
    pub pool_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    /// `(theta, sigma)` after burn-in.
    pub draws: Vec<(f64, f64)>,
    pub log_posterior: Vec<f64>,
    pub accepted: Vec<bool>,
    pub acceptance_rate: f64,
    pub prior_bounds: PriorBounds,
    pub proposal_spec: ProposalSpec,
    pub mode: PosteriorMode,
    pub burn_in: usize,
    pub seed: u64,
    /// Acceptance fell below the configured minimum.
    pub mistuned: bool,
    /// Smallest normalizer ESS seen along the retained draws.
    pub min_ess: f64,
}

impl PosteriorChain {
    pub fn sigmas(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.1).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.0).collect()
    }
}

/// The likelihood surface over `(theta, sigma)` on one fixed pool of
/// symmetric-Dirichlet mixture draws. Base weights toward `Dir(theta/k)`
/// depend on a draw only through `sum log x`, so moving `theta` costs one
/// pass over the pool.
struct Surface {
    pool: WeightedPool,
    h: f64,
    log_x: Vec<f64>,
    k: usize,
}

impl Surface {
    /// `(log Z(theta, sigma), ESS)`.
    fn log_normalizer(&self, theta: f64, sigma: f64) -> (f64, f64) {
        let a = theta / self.k as f64;
        let hs = self.pool.homozygosities();
        let slx = self.pool.sum_log_x();
        let lq = self.pool.log_proposal();
        let t = |i: usize| (a - 1.0) * slx[i] - lq[i];
        let (mut m0, mut m1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..hs.len() {
            let ti = t(i);
            m0 = m0.max(ti);
            m1 = m1.max(ti - sigma * hs[i]);
        }
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for i in 0..hs.len() {
            let ti = t(i);
            s0 += (ti - m0).exp();
            let w = (ti - sigma * hs[i] - m1).exp();
            s1 += w;
            s2 += w * w;
        }
        (m1 + s1.ln() - m0 - s0.ln(), s1 * s1 / s2)
    }

    fn log_likelihood(&self, theta: f64, sigma: f64) -> (f64, f64) {
        let (log_z, ess) = self.log_normalizer(theta, sigma);
        let alphas = vec![theta / self.k as f64; self.k];
        (-sigma * self.h - log_z + dirichlet_log_density(&alphas, &self.log_x), ess)
    }
}

fn pilot_fit(pool: &WeightedPool, x: &SimplexPoint, mle: &MleConfig) -> Result<(MleResult, f64)> {
    let fit = mle_sigma_with(x.homozygosity(), pool, mle)?;
    let ll = if fit.status == MleStatus::Converged {
        let log_z = crate::density::log_normalizer(pool, &crate::model::SelectionModel::symmetric(fit.sigma_hat))?.value;
        -fit.sigma_hat * x.homozygosity().value() - log_z + crate::density::neutral_log_density(x, pool.theta())?
    } else {
        f64::NEG_INFINITY
    };
    Ok((fit, ll))
}

/// Independence Metropolis-Hastings on the posterior under uniform priors,
/// jointly over `(theta, sigma)` or over `sigma` with `theta` fixed.
pub fn posterior_sample(
    x: &SimplexPoint,
    prior: &PriorBounds,
    chain_length: usize,
    seed: u64,
    config: &PosteriorConfig,
) -> Result<PosteriorChain> {
    prior.validate()?;
    if chain_length == 0 {
        return Err(invalid("chain length must be at least 1"));
    }
    let k = x.k();
    let (tlo, thi) = prior.theta;
    let (slo, shi) = prior.sigma;
    let (pool_theta, pool_proposal, theta_proposal) = match config.mode {
        PosteriorMode::Joint => {
            let theta_mid = MutationParams::symmetric((tlo + thi) / 2.0, k)?;
            // log-spaced components spanning the prior's concentrations,
            // plus the usual defensive ones
            let (alo, ahi) = (tlo.max(0.1) / k as f64, thi / k as f64);
            let mut concentrations: Vec<f64> = (0..6).map(|j| alo * (ahi / alo).powf(j as f64 / 5.0)).collect();
            concentrations.extend([2.0, 8.0]);
            (theta_mid, Proposal::Mixture { concentrations }, ThetaProposal::Uniform { lo: tlo, hi: thi })
        }
        PosteriorMode::FixedTheta { theta } => {
            if !(tlo < theta && theta <= thi) {
                return Err(invalid(format!("fixed theta {theta} lies outside the prior bounds")));
            }
            let p = MutationParams::symmetric(theta, k)?;
            let proposal = Proposal::defensive(&p);
            (p, proposal, ThetaProposal::Fixed { theta })
        }
    };
    let pool_cfg = PoolConfig::with_size(config.pool_size)
        .proposal(pool_proposal.clone())
        .retain_draws(false);
    let pool = WeightedPool::build(&pool_theta, &pool_cfg, substream(seed, Stream::Posterior, 1))?;

    // pilot: best conditional fit over a theta scan (or at the fixed theta)
    let mle = MleConfig::default();
    let pilot_thetas: Vec<f64> = match theta_proposal {
        ThetaProposal::Fixed { theta } => vec![theta],
        ThetaProposal::Uniform { lo, hi } => {
            let lo = lo.max(0.1).min(hi);
            let n = config.pilot_scan_points.max(2);
            (0..n).map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64)).collect()
        }
    };
    let mut pilot: Option<(f64, MleResult, f64, f64)> = None;
    for &t in &pilot_thetas {
        let p = pool.retarget(&MutationParams::symmetric(t, k)?)?;
        let (fit, ll) = pilot_fit(&p, x, &mle)?;
        let better = pilot.as_ref().is_none_or(|(_, _, best, _)| ll > *best);
        if better {
            let s = fit.sigma_hat.clamp(slo, shi);
            let var = var_homozygosity(&p, s);
            pilot = Some((t, fit, ll, var));
        }
    }
    let (pilot_theta, pilot_fit, _, pilot_var) = pilot.expect("non-empty pilot scan");
    let center = pilot_fit.sigma_hat.clamp(slo, shi);
    let wald_width = 2.0 / pilot_var.max(1e-300).sqrt();
    let scale = (config.sigma_scale_factor * wald_width).clamp(1e-3 * (shi - slo), shi - slo);

    let surface = Surface {
        pool,
        h: x.homozygosity().value(),
        log_x: x.values().iter().map(|v| v.ln()).collect(),
        k,
    };
    let mut rng = rng_for(seed, Stream::Posterior, 0);
    let propose = |rng: &mut crate::stream::StreamRng| -> (f64, f64) {
        let theta = match theta_proposal {
            ThetaProposal::Fixed { theta } => theta,
            ThetaProposal::Uniform { lo, hi } => hi - (hi - lo) * rng.random::<f64>(),
        };
        let sigma = loop {
            let u: f64 = rng.random::<f64>() - 0.5;
            let s = center - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln();
            if (slo..=shi).contains(&s) {
                break s;
            }
        };
        (theta, sigma)
    };
    let log_q = |sigma: f64| -(sigma - center).abs() / scale;

    let mut state = (pilot_theta.clamp(tlo.max(f64::MIN_POSITIVE), thi), center);
    if !prior.contains(state.0, state.1) {
        state = propose(&mut rng);
    }
    let (mut state_lp, mut state_ess) = surface.log_likelihood(state.0, state.1);
    let total = config.burn_in + chain_length;
    let mut draws = Vec::with_capacity(chain_length);
    let mut log_posterior = Vec::with_capacity(chain_length);
    let mut accepted = Vec::with_capacity(chain_length);
    let mut n_accepted = 0usize;
    let mut min_ess = f64::INFINITY;
    for step in 0..total {
        let cand = propose(&mut rng);
        let (lp, ess) = surface.log_likelihood(cand.0, cand.1);
        let log_ratio = lp - state_lp + log_q(state.1) - log_q(cand.1);
        let u: f64 = rng.random();
        let accept = lp.is_finite() && u.ln() < log_ratio;
        if accept {
            state = cand;
            state_lp = lp;
            state_ess = ess;
        }
        if step >= config.burn_in {
            n_accepted += accept as usize;
            draws.push(state);
            log_posterior.push(state_lp);
            accepted.push(accept);
            min_ess = min_ess.min(state_ess);
        }
    }
    let acceptance_rate = n_accepted as f64 / chain_length as f64;
    Ok(PosteriorChain {
        draws,
        log_posterior,
        accepted,
        acceptance_rate,
        prior_bounds: *prior,
        proposal_spec: ProposalSpec {
            theta: theta_proposal,
            sigma_center: center,
            sigma_scale: scale,
            pool: pool_proposal,
            pool_size: config.pool_size,
        },
        mode: config.mode,
        burn_in: config.burn_in,
        seed,
        mistuned: acceptance_rate < config.min_acceptance,
        min_ess,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub interval: IntervalEstimate,
    /// Posterior mode `(theta, sigma)`: under flat priors, the likelihood
    /// maximized inside the prior box.
    pub mode: (f64, f64),
    pub mode_fit: MleResult,
}

/// Equal-tailed credible interval for `sigma` and the posterior mode.
pub fn posterior_summary(
    chain: &PosteriorChain,
    level: f64,
    x: &SimplexPoint,
    seed: u64,
    config: &JointConfig,
) -> Result<PosteriorSummary> {
    if chain.draws.len() < 1_000 {
        return Err(invalid(format!(
            "posterior summary needs at least 1000 retained draws, got {}",
            chain.draws.len()
        )));
    }
    let interval = percentile_interval(&chain.sigmas(), level, IntervalMethod::Credible)?;
    let prior = chain.prior_bounds;
    let mut fit = match chain.mode {
        PosteriorMode::Joint => {
            let cfg = JointConfig {
                theta_range: (prior.theta.0.max(config.theta_range.0), prior.theta.1),
                ..config.clone()
            };
            mle_joint(x, seed, &cfg)?
        }
        PosteriorMode::FixedTheta { theta } => {
            let p = MutationParams::symmetric(theta, x.k())?;
            let pool_cfg = PoolConfig::with_size(config.pool_size)
                .proposal(Proposal::defensive(&p))
                .retain_draws(false);
            let pool = WeightedPool::build(&p, &pool_cfg, seed)?;
            let mut fit = mle_sigma_with(x.homozygosity(), &pool, &config.mle)?;
            fit.theta_hat = Some(theta);
            fit
        }
    };
    // the profile in sigma is unimodal, so clamping gives the constrained mode
    fit.sigma_hat = fit.sigma_hat.clamp(prior.sigma.0, prior.sigma.1);
    let theta = fit.theta_hat.unwrap_or(f64::NAN);
    Ok(PosteriorSummary {
        interval,
        mode: (theta, fit.sigma_hat),
        mode_fit: fit,
    })
}

#[derive(Serialize)]
struct ChainRow {
    iteration: usize,
    theta: f64,
    sigma: f64,
    log_posterior: f64,
    accepted: bool,
}

/// CSV dump: `iteration,theta,sigma,log_posterior,accepted`.
pub fn write_chain_csv<W: Write>(chain: &PosteriorChain, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, ((theta, sigma), (lp, acc))) in chain
        .draws
        .iter()
        .zip(chain.log_posterior.iter().zip(&chain.accepted))
        .enumerate()
    {
        w.serialize(ChainRow {
            iteration: i,
            theta: *theta,
            sigma: *sigma,
            log_posterior: *lp,
            accepted: *acc,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;

    fn quick(mode: PosteriorMode) -> PosteriorConfig {
        PosteriorConfig {
            mode,
            pool_size: 5_000,
            burn_in: 200,
            pilot_scan_points: 8,
            ..PosteriorConfig::default()
        }
    }

    #[test]
    fn surface_matches_pool_estimate() {
        let x = datasets::lyme();
        let theta = MutationParams::symmetric(4.8, 4).unwrap();
        let pool = WeightedPool::build(&theta, &PoolConfig::with_size(5_000).proposal(Proposal::defensive(&theta)), 1).unwrap();
        let direct = crate::density::log_likelihood(&x, &theta, &crate::SelectionModel::symmetric(30.0), &pool).unwrap();
        let s = Surface {
            pool,
            h: x.homozygosity().value(),
            log_x: x.values().iter().map(|v| v.ln()).collect(),
            k: 4,
        };
        let (ll, _) = s.log_likelihood(4.8, 30.0);
        assert!((ll - direct.value).abs() < 1e-9, "{ll} {}", direct.value);
    }

    #[test]
    fn chain_stays_in_prior_box() {
        let x = datasets::kir();
        let prior = PriorBounds::default();
        let chain = posterior_sample(&x, &prior, 2_000, 4, &quick(PosteriorMode::Joint)).unwrap();
        assert_eq!(chain.draws.len(), 2_000);
        assert!(chain.draws.iter().all(|&(t, s)| prior.contains(t, s)));
        assert!(chain.log_posterior.iter().all(|v| v.is_finite()));
        assert!(chain.acceptance_rate > 0.0 && chain.acceptance_rate < 1.0);
    }

    #[test]
    fn fixed_theta_chain_and_summary() {
        let x = datasets::kir();
        let chain = posterior_sample(&x, &PriorBounds::default(), 3_000, 4, &quick(PosteriorMode::FixedTheta { theta: 5.0 })).unwrap();
        assert!(chain.draws.iter().all(|d| d.0 == 5.0));
        let cfg = JointConfig { pool_size: 5_000, ..JointConfig::default() };
        let wide = posterior_summary(&chain, 0.95, &x, 1, &cfg).unwrap();
        let narrow = posterior_summary(&chain, 0.5, &x, 1, &cfg).unwrap();
        assert!(wide.interval.lower < narrow.interval.lower && narrow.interval.upper < wide.interval.upper);
        assert!(wide.interval.contains(wide.mode.1));
        let mut buf = Vec::new();
        write_chain_csv(&chain, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,theta,sigma,log_posterior,accepted\n"));
        assert_eq!(text.lines().count(), 3_001);
    }

    #[test]
    fn fixed_theta_outside_prior_rejected() {
        let x = datasets::kir();
        let r = posterior_sample(&x, &PriorBounds::default(), 10, 1, &quick(PosteriorMode::FixedTheta { theta: 60.0 }));
        assert!(r.is_err());
    }
}
