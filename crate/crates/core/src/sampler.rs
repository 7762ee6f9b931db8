//! Draws from the neutral Dirichlet law and from the symmetric-selection
//! stationary law.
//!
//! Moderate selection is sampled exactly by rejection from the neutral law
//! with envelope `exp(-sigma (h - h_opt))`, where `h_opt` is the
//! homozygosity minimizing `sigma h` (the centroid for `sigma > 0`, a vertex
//! for `sigma < 0`). Beyond `sigma_switch`, or when a neutral pilot pool
//! predicts an acceptance rate below `min_rejection_rate`, an independence
//! Metropolis-Hastings chain takes over.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{mean_homozygosity, PoolConfig, Proposal, WeightedPool};
use crate::error::{invalid, Error, Result};
use crate::model::{sum_of_squares, MutationParams, SelectionModel, SimplexPoint};
use crate::stream::{exp_clamped, rng_for, substream, LogDirichlet, Stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMethod {
    Rejection,
    IndependenceMh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Largest `|sigma|` sampled by rejection.
    pub sigma_switch: f64,
    /// Rejection is also skipped when its predicted acceptance rate is
    /// below this; for `sigma < 0` the vertex envelope is loose.
    pub min_rejection_rate: f64,
    /// Neutral draws used to predict the rejection acceptance rate.
    pub rate_pool_size: usize,
    /// Rejection gives up once this many proposals were spent on one draw,
    /// or overall with an acceptance rate below `min_acceptance`.
    pub max_proposals: u64,
    pub min_acceptance: f64,
    pub burn_in: usize,
    pub max_thin: usize,
    /// MH acceptance rates below this are flagged in the report.
    pub low_acceptance: f64,
    /// Pool used to moment-match the MH proposal.
    pub tuning_pool_size: usize,
    /// Independent MH chains; their outputs are concatenated in chain order.
    pub chains: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            sigma_switch: 50.0,
            min_rejection_rate: 1e-3,
            rate_pool_size: 4_000,
            max_proposals: 10_000_000,
            min_acceptance: 1e-6,
            burn_in: 1_000,
            max_thin: 100,
            low_acceptance: 0.05,
            tuning_pool_size: 20_000,
            chains: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerReport {
    pub method: SamplerMethod,
    pub n_requested: usize,
    pub n_proposals: u64,
    /// Rejection: accepted / proposed. MH: post-burn-in acceptance fraction.
    pub acceptance_rate: f64,
    pub seed: u64,
    pub burn_in: usize,
    pub thin: usize,
    /// Concentration of the moment-matched MH proposal (`sigma > 0`).
    pub proposal_concentration: Option<f64>,
    /// Vertex boost of the MH mixture proposal (`sigma < 0`).
    pub vertex_boost: Option<f64>,
    pub low_acceptance: bool,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("sample size n must be at least 1"));
    }
    Ok(())
}

fn to_point(log_x: &[f64]) -> SimplexPoint {
    SimplexPoint::new(exp_clamped(log_x)).expect("normalized draw lies on the simplex")
}

/// i.i.d. draws from the neutral Dirichlet law.
pub fn sample_neutral(theta: &MutationParams, n: usize, seed: u64) -> Result<Vec<SimplexPoint>> {
    check_n(n)?;
    let dirichlet = LogDirichlet::new(theta.per_allele())?;
    let k = theta.k();
    Ok((0..n)
        .into_par_iter()
        .map_init(
            || vec![0.0; k],
            |buf, i| {
                let mut rng = rng_for(seed, Stream::Neutral, i as u64);
                dirichlet.sample_log(&mut rng, buf);
                to_point(buf)
            },
        )
        .collect())
}

/// Draws from the stationary law with symmetric selection `sigma`.
pub fn sample_selection(
    theta: &MutationParams,
    sigma: f64,
    n: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<(Vec<SimplexPoint>, SamplerReport)> {
    check_n(n)?;
    if !sigma.is_finite() {
        return Err(invalid("sigma must be finite"));
    }
    if sigma.abs() <= config.sigma_switch && predicted_rejection_rate(theta, sigma, seed, config)? >= config.min_rejection_rate {
        sample_rejection(theta, sigma, n, seed, config)
    } else {
        sample_mh_symmetric(theta, sigma, n, seed, config)
    }
}

fn envelope_optimum(sigma: f64, k: usize) -> f64 {
    if sigma >= 0.0 {
        1.0 / k as f64
    } else {
        1.0
    }
}

/// `E_Neut(exp(-sigma (H - h_opt)))` estimated on a small neutral pool.
pub fn predicted_rejection_rate(theta: &MutationParams, sigma: f64, seed: u64, config: &SamplerConfig) -> Result<f64> {
    if sigma == 0.0 {
        return Ok(1.0);
    }
    let cfg = PoolConfig::with_size(config.rate_pool_size.max(1)).retain_draws(false);
    let pool = WeightedPool::build(theta, &cfg, substream(seed, Stream::Tuning, 1))?;
    let h_opt = envelope_optimum(sigma, theta.k());
    let hs = pool.homozygosities();
    Ok(hs.iter().map(|h| (-sigma * (h - h_opt)).exp().min(1.0)).sum::<f64>() / hs.len() as f64)
}

fn sample_rejection(
    theta: &MutationParams,
    sigma: f64,
    n: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<(Vec<SimplexPoint>, SamplerReport)> {
    let k = theta.k();
    let dirichlet = LogDirichlet::new(theta.per_allele())?;
    let h_opt = envelope_optimum(sigma, k);
    let cap = config.max_proposals;

    let draws: Vec<std::result::Result<(SimplexPoint, u64), u64>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0; k], vec![0.0; k]),
            |(log_x, x), i| {
                let mut rng = rng_for(seed, Stream::Rejection, i as u64);
                let mut tries = 0u64;
                loop {
                    tries += 1;
                    dirichlet.sample_log(&mut rng, log_x);
                    for (xi, lx) in x.iter_mut().zip(log_x.iter()) {
                        *xi = lx.exp();
                    }
                    let h = sum_of_squares(x);
                    let log_accept = -sigma * (h - h_opt);
                    let u: f64 = rng.random();
                    if u.ln() < log_accept {
                        return Ok((to_point(log_x), tries));
                    }
                    if tries >= cap {
                        return Err(tries);
                    }
                }
            },
        )
        .collect();

    let mut points = Vec::with_capacity(n);
    let mut proposals = 0u64;
    for d in draws {
        match d {
            Ok((p, t)) => {
                proposals += t;
                points.push(p);
            }
            Err(t) => {
                proposals += t;
                return Err(Error::RejectionStarved {
                    rate: points.len() as f64 / proposals as f64,
                    proposals,
                });
            }
        }
    }
    let rate = n as f64 / proposals as f64;
    if proposals >= cap && rate < config.min_acceptance {
        return Err(Error::RejectionStarved { rate, proposals });
    }
    Ok((
        points,
        SamplerReport {
            method: SamplerMethod::Rejection,
            n_requested: n,
            n_proposals: proposals,
            acceptance_rate: rate,
            seed,
            burn_in: 0,
            thin: 1,
            proposal_concentration: None,
            vertex_boost: None,
            low_acceptance: false,
        },
    ))
}

/// Symmetric Dirichlet concentration whose mean homozygosity is `g`:
/// `E(H) = (c + 1) / (k c + 1)`.
pub fn moment_matched_concentration(g: f64, k: usize) -> f64 {
    let k = k as f64;
    let g = g.clamp(1.0 / k + 1e-12, 1.0 - 1e-12);
    ((1.0 - g) / (g * k - 1.0)).clamp(1e-3, 1e7)
}

struct ChainOutput {
    states: Vec<Vec<f64>>,
    accepted: u64,
    steps: u64,
    thin: usize,
}

/// Independence sampler: `log_weight` is log target minus log proposal, up
/// to a constant, evaluated on log-coordinates.
/// Independence proposal on log-coordinates.
trait ChainProposal: Sync {
    fn k(&self) -> usize;
    fn sample_log(&self, rng: &mut StreamRng, log_x: &mut [f64]);
}

impl ChainProposal for LogDirichlet {
    fn k(&self) -> usize {
        LogDirichlet::k(self)
    }

    fn sample_log(&self, rng: &mut StreamRng, log_x: &mut [f64]) {
        LogDirichlet::sample_log(self, rng, log_x)
    }
}

/// Proposal for homozygote advantage: with probability `base_share` the
/// neutral law, otherwise `Dir(theta + boost e_j)` for a uniform vertex `j`.
/// Near vertex `j`, `H ~ 1 - 2 (1 - x_j)`, so `boost = 2 |sigma|` matches the
/// target's decay away from the vertex.
struct VertexMixture {
    base: LogDirichlet,
    tilted: Vec<LogDirichlet>,
    base_share: f64,
}

impl VertexMixture {
    fn new(alphas: &[f64], boost: f64, base_share: f64) -> Result<Self> {
        let tilted = (0..alphas.len())
            .map(|j| {
                let mut a = alphas.to_vec();
                a[j] += boost;
                LogDirichlet::new(a)
            })
            .collect::<Result<_>>()?;
        Ok(Self { base: LogDirichlet::new(alphas.to_vec())?, tilted, base_share })
    }

    fn log_density(&self, log_x: &[f64]) -> f64 {
        let k = self.tilted.len() as f64;
        let mut terms = Vec::with_capacity(self.tilted.len() + 1);
        terms.push(self.base_share.ln() + self.base.log_density(log_x));
        let share = ((1.0 - self.base_share) / k).ln();
        terms.extend(self.tilted.iter().map(|d| share + d.log_density(log_x)));
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
    }
}

impl ChainProposal for VertexMixture {
    fn k(&self) -> usize {
        self.base.k()
    }

    fn sample_log(&self, rng: &mut StreamRng, log_x: &mut [f64]) {
        let u: f64 = rng.random();
        if u < self.base_share {
            self.base.sample_log(rng, log_x);
        } else {
            let j = rng.random_range(0..self.tilted.len());
            self.tilted[j].sample_log(rng, log_x);
        }
    }
}

fn independence_chain<P, F>(
    proposal: &P,
    log_weight: &F,
    n: usize,
    burn_in: usize,
    max_thin: usize,
    rng: &mut StreamRng,
) -> ChainOutput
where
    P: ChainProposal,
    F: Fn(&[f64]) -> f64,
{
    let k = proposal.k();
    let mut state = vec![0.0; k];
    proposal.sample_log(rng, &mut state);
    let mut state_w = log_weight(&state);
    let mut candidate = vec![0.0; k];

    let mut step = |state: &mut Vec<f64>, state_w: &mut f64, rng: &mut StreamRng| -> bool {
        proposal.sample_log(rng, &mut candidate);
        let w = log_weight(&candidate);
        let u: f64 = rng.random();
        if u.ln() < w - *state_w {
            state.copy_from_slice(&candidate);
            *state_w = w;
            true
        } else {
            false
        }
    };

    let mut burn_accepted = 0usize;
    for _ in 0..burn_in {
        burn_accepted += step(&mut state, &mut state_w, rng) as usize;
    }
    let burn_rate = if burn_in > 0 {
        burn_accepted as f64 / burn_in as f64
    } else {
        1.0
    };
    let thin = if burn_rate > 0.0 {
        ((5.0 / burn_rate).ceil() as usize).clamp(1, max_thin)
    } else {
        max_thin
    };

    let mut states = Vec::with_capacity(n);
    let mut accepted = 0u64;
    let mut steps = 0u64;
    while states.len() < n {
        for _ in 0..thin {
            accepted += step(&mut state, &mut state_w, rng) as u64;
            steps += 1;
        }
        states.push(state.clone());
    }
    ChainOutput {
        states,
        accepted,
        steps,
        thin,
    }
}

fn run_chains<P, F>(
    proposal: &P,
    log_weight: F,
    n: usize,
    seed: u64,
    config: &SamplerConfig,
) -> (Vec<SimplexPoint>, u64, u64, usize)
where
    P: ChainProposal,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let chains = config.chains.max(1).min(n);
    let outputs: Vec<ChainOutput> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let share = n / chains + usize::from(c < n % chains);
            let mut rng = rng_for(seed, Stream::Chain, c as u64);
            independence_chain(proposal, &log_weight, share, config.burn_in, config.max_thin, &mut rng)
        })
        .collect();
    let mut points = Vec::with_capacity(n);
    let (mut accepted, mut steps, mut thin) = (0, 0, 1);
    for out in outputs {
        accepted += out.accepted;
        steps += out.steps;
        thin = thin.max(out.thin);
        points.extend(out.states.iter().map(|s| to_point(s)));
    }
    (points, accepted, steps, thin)
}

fn sample_mh_symmetric(
    theta: &MutationParams,
    sigma: f64,
    n: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<(Vec<SimplexPoint>, SamplerReport)> {
    let k = theta.k();
    let alphas = theta.per_allele();
    let homozygosity = |log_x: &[f64]| log_x.iter().map(|v| (2.0 * v).exp()).sum::<f64>();
    let (points, accepted, steps, thin, concentration, boost) = if sigma < 0.0 {
        let boost = 2.0 * sigma.abs();
        let proposal = VertexMixture::new(&alphas, boost, 0.5)?;
        let log_weight = |log_x: &[f64]| {
            let neutral: f64 = alphas.iter().zip(log_x).map(|(a, lx)| (a - 1.0) * lx).sum();
            -sigma * homozygosity(log_x) + neutral - proposal.log_density(log_x)
        };
        let (p, a, s, t) = run_chains(&proposal, log_weight, n, seed, config);
        (p, a, s, t, None, Some(boost))
    } else {
        let pool_cfg = PoolConfig::with_size(config.tuning_pool_size)
            .proposal(Proposal::auto(theta, sigma))
            .retain_draws(false);
        let pool = WeightedPool::build(theta, &pool_cfg, substream(seed, Stream::Tuning, 0))?;
        let concentration = moment_matched_concentration(mean_homozygosity(&pool, sigma), k);
        let proposal = LogDirichlet::symmetric(concentration, k)?;
        let log_weight = |log_x: &[f64]| {
            let mut w = -sigma * homozygosity(log_x);
            for (a, lx) in alphas.iter().zip(log_x) {
                w += (a - concentration) * lx;
            }
            w
        };
        let (p, a, s, t) = run_chains(&proposal, log_weight, n, seed, config);
        (p, a, s, t, Some(concentration), None)
    };
    let rate = accepted as f64 / steps as f64;
    Ok((
        points,
        SamplerReport {
            method: SamplerMethod::IndependenceMh,
            n_requested: n,
            n_proposals: steps,
            acceptance_rate: rate,
            seed,
            burn_in: config.burn_in,
            thin,
            proposal_concentration: concentration,
            vertex_boost: boost,
            low_acceptance: rate < config.low_acceptance,
        },
    ))
}

/// Draws under a general selection matrix by independence MH with the
/// neutral law as proposal.
pub fn sample_selection_general(
    theta: &MutationParams,
    model: &SelectionModel,
    n: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<(Vec<SimplexPoint>, SamplerReport)> {
    check_n(n)?;
    let matrix = model.to_matrix(theta.k())?;
    let proposal = LogDirichlet::new(theta.per_allele())?;
    let log_weight = |log_x: &[f64]| {
        let x: Vec<f64> = log_x.iter().map(|v| v.exp()).collect();
        -matrix.bilinear(&x)
    };
    let (points, accepted, steps, thin) = run_chains(&proposal, log_weight, n, seed, config);
    let rate = accepted as f64 / steps as f64;
    Ok((
        points,
        SamplerReport {
            method: SamplerMethod::IndependenceMh,
            n_requested: n,
            n_proposals: steps,
            acceptance_rate: rate,
            seed,
            burn_in: config.burn_in,
            thin,
            proposal_concentration: None,
            vertex_boost: None,
            low_acceptance: rate < config.low_acceptance,
        },
    ))
}

#[derive(Serialize)]
struct SampleLine<'a> {
    index: usize,
    x: &'a [f64],
}

/// One JSON object per line: `{"index": i, "x": [...]}`.
pub fn write_samples_jsonl<W: Write>(points: &[SimplexPoint], mut out: W) -> Result<()> {
    for (index, p) in points.iter().enumerate() {
        serde_json::to_writer(&mut out, &SampleLine { index, x: p.values() })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(theta: f64, k: usize) -> MutationParams {
        MutationParams::symmetric(theta, k).unwrap()
    }

    #[test]
    fn neutral_coordinate_means() {
        let pts = sample_neutral(&sym(3.0, 5), 40_000, 1).unwrap();
        for j in 0..5 {
            let xs: Vec<f64> = pts.iter().map(|p| p.values()[j]).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / xs.len() as f64;
            assert!((mean - 0.2).abs() < 3.0 * (var / xs.len() as f64).sqrt() + 1e-3);
        }
    }

    #[test]
    fn neutral_second_moment() {
        let theta = MutationParams::general(vec![2.0, 2.0]).unwrap();
        let pts = sample_neutral(&theta, 100_000, 2).unwrap();
        let m2 = pts.iter().map(|p| p.values()[0].powi(2)).sum::<f64>() / 1e5;
        assert!((m2 - 0.3).abs() < 4.0 * 0.22 / 1e5f64.sqrt());
    }

    #[test]
    fn zero_n_rejected() {
        assert!(sample_neutral(&sym(1.0, 2), 0, 1).is_err());
        assert!(sample_selection(&sym(1.0, 2), 1.0, 0, 1, &SamplerConfig::default()).is_err());
    }

    #[test]
    fn zero_sigma_is_neutral_with_full_acceptance() {
        let (pts, report) = sample_selection(&sym(4.8, 4), 0.0, 500, 3, &SamplerConfig::default()).unwrap();
        assert_eq!(report.method, SamplerMethod::Rejection);
        assert_eq!(report.acceptance_rate, 1.0);
        assert_eq!(report.n_proposals, 500);
        assert_eq!(pts.len(), 500);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SamplerConfig::default();
        let a = sample_selection(&sym(4.8, 4), 20.0, 200, 9, &cfg).unwrap();
        let b = sample_selection(&sym(4.8, 4), 20.0, 200, 9, &cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_selection(&sym(4.8, 4), 300.0, 200, 9, &cfg).unwrap();
        let d = sample_selection(&sym(4.8, 4), 300.0, 200, 9, &cfg).unwrap();
        assert_eq!(c, d);
        assert_eq!(c.1.method, SamplerMethod::IndependenceMh);
    }

    #[test]
    fn starvation_is_reported() {
        let cfg = SamplerConfig {
            sigma_switch: 1e9,
            min_rejection_rate: 0.0,
            max_proposals: 1000,
            ..SamplerConfig::default()
        };
        let err = sample_selection(&sym(0.5, 10), 5000.0, 5, 1, &cfg).unwrap_err();
        assert!(matches!(err, Error::RejectionStarved { .. }));
    }

    #[test]
    fn loose_envelope_switches_to_mh() {
        let cfg = SamplerConfig::default();
        let theta = sym(5.0, 10);
        assert!(predicted_rejection_rate(&theta, -50.0, 1, &cfg).unwrap() < 1e-6);
        let (_, rep) = sample_selection(&theta, -50.0, 50, 1, &cfg).unwrap();
        assert_eq!(rep.method, SamplerMethod::IndependenceMh);
        let (_, rep) = sample_selection(&theta, 20.0, 50, 1, &cfg).unwrap();
        assert_eq!(rep.method, SamplerMethod::Rejection);
    }

    #[test]
    fn moment_matching_inverts_mean() {
        for (g, k) in [(0.3, 4), (0.26, 4), (0.9, 10)] {
            let c = moment_matched_concentration(g, k);
            let back = (c + 1.0) / (k as f64 * c + 1.0);
            assert!((back - g).abs() < 1e-12);
        }
    }

    #[test]
    fn general_identity_behaves_like_symmetric() {
        let theta = sym(4.8, 4);
        let m = SelectionModel::General {
            matrix: crate::model::SelectionMatrix::scaled_identity(20.0, 4),
        };
        let (pts, rep) = sample_selection_general(&theta, &m, 4000, 5, &SamplerConfig::default()).unwrap();
        let (pts2, _) = sample_selection(&theta, 20.0, 4000, 5, &SamplerConfig::default()).unwrap();
        let mean = |v: &[SimplexPoint]| v.iter().map(|p| p.homozygosity().value()).sum::<f64>() / v.len() as f64;
        assert!((mean(&pts) - mean(&pts2)).abs() < 0.01, "{} {}", mean(&pts), mean(&pts2));
        assert!(rep.acceptance_rate > 0.0);
    }

    #[test]
    fn jsonl_lines() {
        let pts = sample_neutral(&sym(2.0, 3), 3, 1).unwrap();
        let mut buf = Vec::new();
        write_samples_jsonl(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let v: serde_json::Value = serde_json::from_str(lines[2]).unwrap();
        assert_eq!(v["index"], 2);
        assert_eq!(v["x"].as_array().unwrap().len(), 3);
    }
}
