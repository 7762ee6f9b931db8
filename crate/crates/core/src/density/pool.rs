use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{sum_of_squares, MutationParams};
use crate::stream::{dirichlet_log_density, rng_for, LogDirichlet, Stream};

/// `|sigma|` above which [`Proposal::auto`] switches to the defensive mixture.
pub const DEFENSIVE_THRESHOLD: f64 = 200.0;

/// Extra concentrations mixed in by the defensive proposal. Larger values
/// put draws near the centroid, where strong heterozygote advantage lives.
pub const DEFENSIVE_CONCENTRATIONS: [f64; 2] = [2.0, 8.0];

pub const DEFAULT_ESS_FLOOR: f64 = 200.0;

/// Proposal law of a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Proposal {
    /// The neutral law itself; base weights are all zero.
    Matched,
    /// Symmetric Dirichlet with one concentration.
    Symmetric { concentration: f64 },
    /// Equal-share deterministic mixture of symmetric Dirichlets, weighted
    /// by the balance heuristic.
    Mixture { concentrations: Vec<f64> },
    /// Half the draws from the symmetric mixture `base`, half from spiked
    /// components: for each `count` m and `bulk` c, a uniformly placed set of
    /// m alleles gets concentration `spike` and the rest get c.
    Spiked {
        spike: f64,
        counts: Vec<usize>,
        bulks: Vec<f64>,
        base: Vec<f64>,
    },
}

/// Bulk concentrations of the spiked proposal.
pub const SPIKED_BULKS: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

impl Proposal {
    /// `{theta/k, 2, 8}` mixture. With `theta/k < 1` the neutral law piles
    /// onto a few alleles while selection pulls toward the centroid, so half
    /// the draws go to spiked components that cover the states in between.
    pub fn defensive(theta: &MutationParams) -> Self {
        let k = theta.k();
        let rate = theta.total() / k as f64;
        let mut base = vec![rate];
        base.extend(DEFENSIVE_CONCENTRATIONS);
        if rate >= 1.0 || k < 3 {
            return Proposal::Mixture { concentrations: base };
        }
        let mut counts: Vec<usize> = [0, k.div_ceil(8), k.div_ceil(4), k.div_ceil(2), (3 * k).div_ceil(4)]
            .into_iter()
            .filter(|&m| m < k)
            .collect();
        counts.dedup();
        Proposal::Spiked {
            spike: rate,
            counts,
            bulks: SPIKED_BULKS.to_vec(),
            base,
        }
    }

    /// Matched proposal, or the defensive mixture when the pool has to serve
    /// selection intensities beyond [`DEFENSIVE_THRESHOLD`].
    pub fn auto(theta: &MutationParams, sigma_reach: f64) -> Self {
        if sigma_reach.abs() > DEFENSIVE_THRESHOLD {
            Self::defensive(theta)
        } else {
            Self::Matched
        }
    }

    fn layout(&self, theta: &MutationParams) -> Result<Layout> {
        let k = theta.k();
        let symmetric = |a: &[f64]| -> Vec<Component> { a.iter().map(|&a| Component::Dirichlet(vec![a; k])).collect() };
        let (components, pattern) = match self {
            Proposal::Matched => (vec![Component::Dirichlet(theta.per_allele())], vec![0]),
            Proposal::Symmetric { concentration } => (symmetric(&[*concentration]), vec![0]),
            Proposal::Mixture { concentrations } => {
                if concentrations.is_empty() {
                    return Err(invalid("mixture proposal needs at least one component"));
                }
                (symmetric(concentrations), (0..concentrations.len()).collect())
            }
            Proposal::Spiked {
                spike,
                counts,
                bulks,
                base,
            } => {
                if base.is_empty() || counts.is_empty() || bulks.is_empty() {
                    return Err(invalid("spiked proposal needs base, counts and bulks"));
                }
                if let Some(m) = counts.iter().find(|&&m| m >= k) {
                    return Err(invalid(format!("spike count {m} must be below k = {k}")));
                }
                let mut comps = symmetric(base);
                for &bulk in bulks {
                    for &count in counts {
                        comps.push(Component::Spiked {
                            spike: *spike,
                            bulk,
                            count,
                        });
                    }
                }
                // base components repeat once per spiked one and vice versa,
                // so each half gets an equal share
                let (nb, ns) = (base.len(), comps.len() - base.len());
                let mut pattern = Vec::with_capacity(2 * nb * ns);
                for _ in 0..ns {
                    pattern.extend(0..nb);
                }
                for _ in 0..nb {
                    pattern.extend(nb..nb + ns);
                }
                (comps, pattern)
            }
        };
        Layout::new(k, components, pattern)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Component {
    Dirichlet(Vec<f64>),
    Spiked { spike: f64, bulk: f64, count: usize },
}

/// Sampling and density evaluation for the components of a proposal. Draw
/// `i` comes from component `pattern[i % pattern.len()]`.
struct Layout {
    k: usize,
    components: Vec<Component>,
    pattern: Vec<usize>,
    samplers: Vec<LogDirichlet>,
    /// Log normalizing constant of each component (zero for plain ones).
    log_const: Vec<f64>,
    /// Spiked components grouped by `(spike, bulk)`, with the largest count.
    groups: Vec<(f64, f64, usize, Vec<usize>)>,
}

impl Layout {
    fn new(k: usize, components: Vec<Component>, pattern: Vec<usize>) -> Result<Self> {
        let mut samplers = Vec::with_capacity(components.len());
        let mut log_const = Vec::with_capacity(components.len());
        let mut groups: Vec<(f64, f64, usize, Vec<usize>)> = Vec::new();
        for (j, comp) in components.iter().enumerate() {
            match comp {
                Component::Dirichlet(alphas) => {
                    samplers.push(LogDirichlet::new(alphas.clone())?);
                    log_const.push(0.0);
                }
                &Component::Spiked { spike, bulk, count } => {
                    let mut alphas = vec![spike; count];
                    alphas.resize(k, bulk);
                    samplers.push(LogDirichlet::new(alphas)?);
                    let (m, r) = (count as f64, (k - count) as f64);
                    log_const.push(
                        ln_gamma(m * spike + r * bulk) - m * ln_gamma(spike) - r * ln_gamma(bulk)
                            - (ln_gamma(k as f64 + 1.0) - ln_gamma(m + 1.0) - ln_gamma(r + 1.0)),
                    );
                    match groups.iter_mut().find(|g| g.0 == spike && g.1 == bulk) {
                        Some(g) => {
                            g.2 = g.2.max(count);
                            g.3.push(j);
                        }
                        None => groups.push((spike, bulk, count, vec![j])),
                    }
                }
            }
        }
        Ok(Self {
            k,
            components,
            pattern,
            samplers,
            log_const,
            groups,
        })
    }

    fn len(&self) -> usize {
        self.components.len()
    }

    fn component_of(&self, i: usize) -> usize {
        self.pattern[i % self.pattern.len()]
    }

    /// Log of the fraction of `n` draws owned by each component.
    fn log_shares(&self, n: usize) -> Vec<f64> {
        let p = self.pattern.len();
        let mut counts = vec![n / p; self.len()];
        let mut per_cycle = vec![0usize; self.len()];
        for &j in &self.pattern {
            per_cycle[j] += 1;
        }
        for (c, q) in counts.iter_mut().zip(&per_cycle) {
            *c *= q;
        }
        for &j in &self.pattern[..n % p] {
            counts[j] += 1;
        }
        counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect()
    }

    fn sample_log<R: Rng + ?Sized>(&self, j: usize, rng: &mut R, log_x: &mut [f64]) {
        self.samplers[j].sample_log(rng, log_x);
        if matches!(self.components[j], Component::Spiked { .. }) {
            log_x.shuffle(rng);
        }
    }

    /// Per-component log densities at `log_x`, plus `log_share`.
    fn log_terms(&self, log_x: &[f64], log_share: &[f64], terms: &mut [f64], scratch: &mut Scratch) {
        for (j, comp) in self.components.iter().enumerate() {
            if let Component::Dirichlet(alphas) = comp {
                terms[j] = log_share[j] + dirichlet_log_density(alphas, log_x);
            }
        }
        if self.groups.is_empty() {
            return;
        }
        let sum_log_x: f64 = log_x.iter().sum();
        let sorted = &mut scratch.sorted;
        sorted.clear();
        sorted.extend_from_slice(log_x);
        sorted.sort_by(f64::total_cmp);
        for (spike, bulk, top, members) in &self.groups {
            // elementary symmetric polynomials e_m of z_i = x_i^(spike - bulk).
            // With z sorted in decreasing order, e_m is carried divided by the
            // product of the m largest z, which keeps its leading term at 1.
            let d = spike - bulk;
            let lz = &mut scratch.lz;
            lz.clear();
            if d < 0.0 {
                lz.extend(sorted.iter().map(|l| d * l));
            } else {
                lz.extend(sorted.iter().rev().map(|l| d * l));
            }
            let e = &mut scratch.esp;
            e.clear();
            e.resize(top + 1, 0.0);
            e[0] = 1.0;
            for (i, &l) in lz.iter().enumerate() {
                for m in (1..=(i + 1).min(*top)).rev() {
                    e[m] += (l - lz[m - 1]).exp() * e[m - 1];
                }
            }
            for &j in members {
                let Component::Spiked { count, .. } = self.components[j] else {
                    unreachable!()
                };
                let lead: f64 = lz[..count].iter().sum();
                terms[j] = log_share[j] + self.log_const[j] + (bulk - 1.0) * sum_log_x + e[count].ln() + lead;
            }
        }
        debug_assert_eq!(log_x.len(), self.k);
    }
}

#[derive(Default)]
struct Scratch {
    esp: Vec<f64>,
    sorted: Vec<f64>,
    lz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub size: usize,
    pub proposal: Proposal,
    /// Keep the full frequency vectors. Needed for general selection
    /// matrices; symmetric queries only use homozygosities.
    pub retain_draws: bool,
    pub ess_floor: f64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self {
            size: 100_000,
            proposal: Proposal::Matched,
            retain_draws: true,
            ess_floor: DEFAULT_ESS_FLOOR,
        }
    }
}

impl PoolConfig {
    pub fn with_size(size: usize) -> Self {
        Self {
            size,
            ..Self::default()
        }
    }

    pub fn proposal(mut self, proposal: Proposal) -> Self {
        self.proposal = proposal;
        self
    }

    pub fn retain_draws(mut self, retain: bool) -> Self {
        self.retain_draws = retain;
        self
    }
}

/// An immutable set of proposal draws with their homozygosities and
/// importance log-weights toward the neutral law at `theta`.
///
/// Selection enters only at query time, through `exp(-x' S x)`, so one pool
/// serves every selection intensity and all derived curves are smooth,
/// deterministic functions of it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPool {
    theta: MutationParams,
    proposal: Proposal,
    seed: u64,
    k: usize,
    ess_floor: f64,
    h: Vec<f64>,
    base_log_weight: Vec<f64>,
    log_proposal: Vec<f64>,
    sum_log_x: Vec<f64>,
    draws: Option<Vec<f64>>,
    log_base_mass: f64,
    h_min: f64,
    h_max: f64,
}

const CHUNK: usize = 4096;

struct Chunk {
    h: Vec<f64>,
    b: Vec<f64>,
    log_q: Vec<f64>,
    slx: Vec<f64>,
    x: Vec<f64>,
}

/// `n` draws from a symmetric Dirichlet(`proposal_a`) proposal targeting the
/// neutral law at `theta`.
pub fn build_pool(theta: &MutationParams, proposal_a: f64, n: usize, seed: u64) -> Result<WeightedPool> {
    let proposal = match theta.symmetric_rate() {
        Some(rate) if rate == proposal_a => Proposal::Matched,
        _ => Proposal::Symmetric {
            concentration: proposal_a,
        },
    };
    WeightedPool::build(theta, &PoolConfig::with_size(n).proposal(proposal), seed)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl WeightedPool {
    pub fn build(theta: &MutationParams, config: &PoolConfig, seed: u64) -> Result<Self> {
        if config.size == 0 {
            return Err(invalid("pool size must be at least 1"));
        }
        let k = theta.k();
        let layout = config.proposal.layout(theta)?;
        let target = theta.per_allele();
        let n = config.size;
        let c = layout.len();
        // balance heuristic over the actual share of each component
        let log_share = layout.log_shares(n);
        let matched = matches!(config.proposal, Proposal::Matched);
        let retain = config.retain_draws;

        let chunks: Vec<Chunk> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|ci| {
                let start = ci * CHUNK;
                let end = (start + CHUNK).min(n);
                let len = end - start;
                let mut out = Chunk {
                    h: Vec::with_capacity(len),
                    b: Vec::with_capacity(len),
                    log_q: Vec::with_capacity(len),
                    slx: Vec::with_capacity(len),
                    x: if retain { Vec::with_capacity(len * k) } else { Vec::new() },
                };
                let mut log_x = vec![0.0; k];
                let mut x = vec![0.0; k];
                let mut terms = vec![0.0; c];
                let mut scratch = Scratch::default();
                for i in start..end {
                    let mut rng = rng_for(seed, Stream::Pool, i as u64);
                    layout.sample_log(layout.component_of(i), &mut rng, &mut log_x);
                    for (xi, lx) in x.iter_mut().zip(&log_x) {
                        *xi = lx.exp();
                    }
                    layout.log_terms(&log_x, &log_share, &mut terms, &mut scratch);
                    let log_q = log_sum_exp(&terms);
                    let b = if matched {
                        0.0
                    } else {
                        dirichlet_log_density(&target, &log_x) - log_q
                    };
                    out.h.push(sum_of_squares(&x));
                    out.b.push(b);
                    out.log_q.push(log_q);
                    out.slx.push(log_x.iter().sum());
                    if retain {
                        out.x.extend_from_slice(&x);
                    }
                }
                out
            })
            .collect();

        let mut h = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        let mut log_q = Vec::with_capacity(n);
        let mut slx = Vec::with_capacity(n);
        let mut draws = retain.then(|| Vec::with_capacity(n * k));
        for chunk in chunks {
            h.extend(chunk.h);
            b.extend(chunk.b);
            log_q.extend(chunk.log_q);
            slx.extend(chunk.slx);
            if let Some(d) = draws.as_mut() {
                d.extend(chunk.x);
            }
        }
        Self::assemble(
            theta.clone(),
            config.proposal.clone(),
            seed,
            config.ess_floor,
            h,
            b,
            log_q,
            slx,
            draws,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        theta: MutationParams,
        proposal: Proposal,
        seed: u64,
        ess_floor: f64,
        h: Vec<f64>,
        base_log_weight: Vec<f64>,
        log_proposal: Vec<f64>,
        sum_log_x: Vec<f64>,
        draws: Option<Vec<f64>>,
    ) -> Result<Self> {
        let k = theta.k();
        if let Some(bad) = base_log_weight.iter().position(|b| !b.is_finite()) {
            return Err(invalid(format!("pool draw {bad} has a non-finite base weight")));
        }
        let log_base_mass = log_sum_exp(&base_log_weight);
        let h_min = h.iter().copied().fold(f64::INFINITY, f64::min);
        let h_max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            theta,
            proposal,
            seed,
            k,
            ess_floor,
            h,
            base_log_weight,
            log_proposal,
            sum_log_x,
            draws,
            log_base_mass,
            h_min,
            h_max,
        })
    }

    /// Same draws, base weights recomputed toward a different neutral law.
    pub fn retarget(&self, theta: &MutationParams) -> Result<Self> {
        if theta.k() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: theta.k(),
            });
        }
        let b: Vec<f64> = match theta.symmetric_rate() {
            Some(rate) => {
                let constant = dirichlet_log_density(&vec![rate; self.k], &vec![0.0; self.k]);
                self.sum_log_x
                    .iter()
                    .zip(&self.log_proposal)
                    .map(|(slx, lq)| constant + (rate - 1.0) * slx - lq)
                    .collect()
            }
            None => {
                let draws = self.draws.as_ref().ok_or(Error::DrawsNotRetained)?;
                let alphas = theta.per_allele();
                draws
                    .chunks(self.k)
                    .zip(&self.log_proposal)
                    .map(|(x, lq)| {
                        let log_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
                        dirichlet_log_density(&alphas, &log_x) - lq
                    })
                    .collect()
            }
        };
        Self::assemble(
            theta.clone(),
            self.proposal.clone(),
            self.seed,
            self.ess_floor,
            self.h.clone(),
            b,
            self.log_proposal.clone(),
            self.sum_log_x.clone(),
            self.draws.clone(),
        )
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn theta(&self) -> &MutationParams {
        &self.theta
    }

    pub fn proposal(&self) -> &Proposal {
        &self.proposal
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ess_floor(&self) -> f64 {
        self.ess_floor
    }

    pub fn with_ess_floor(mut self, floor: f64) -> Self {
        self.ess_floor = floor;
        self
    }

    pub fn homozygosities(&self) -> &[f64] {
        &self.h
    }

    pub fn base_log_weights(&self) -> &[f64] {
        &self.base_log_weight
    }

    pub fn min_homozygosity(&self) -> f64 {
        self.h_min
    }

    pub fn max_homozygosity(&self) -> f64 {
        self.h_max
    }

    pub fn retains_draws(&self) -> bool {
        self.draws.is_some()
    }

    /// Frequency vector of draw `i`, when retained.
    pub fn draw(&self, i: usize) -> Option<&[f64]> {
        self.draws.as_ref().map(|d| &d[i * self.k..(i + 1) * self.k])
    }

    pub(crate) fn draws_flat(&self) -> Option<&[f64]> {
        self.draws.as_deref()
    }

    pub(crate) fn sum_log_x(&self) -> &[f64] {
        &self.sum_log_x
    }

    pub(crate) fn log_proposal(&self) -> &[f64] {
        &self.log_proposal
    }

    /// `log sum exp(b_i)`.
    pub(crate) fn log_base_mass(&self) -> f64 {
        self.log_base_mass
    }

    /// Writes the pool as JSON lines: a header, then one record per draw.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let header = PoolHeader {
            format: POOL_FORMAT.to_string(),
            seed: self.seed,
            theta: self.theta.clone(),
            proposal: self.proposal.clone(),
            n: self.len(),
            k: self.k,
            ess_floor: self.ess_floor,
            retain_draws: self.draws.is_some(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for i in 0..self.len() {
            let record = PoolRecord {
                i,
                x: self.draw(i).map(<[f64]>::to_vec),
                h: self.h[i],
                b: self.base_log_weight[i],
                log_q: self.log_proposal[i],
                sum_log_x: self.sum_log_x[i],
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, first) = lines.next().ok_or(Error::MalformedPool {
            line: 1,
            reason: "empty file".into(),
        })?;
        let header: PoolHeader = serde_json::from_str(&first?).map_err(|e| Error::MalformedPool {
            line: 1,
            reason: e.to_string(),
        })?;
        if header.format != POOL_FORMAT {
            return Err(Error::MalformedPool {
                line: 1,
                reason: format!("unknown format {:?}", header.format),
            });
        }
        let k = header.k;
        let mut h = Vec::with_capacity(header.n);
        let mut b = Vec::with_capacity(header.n);
        let mut log_q = Vec::with_capacity(header.n);
        let mut slx = Vec::with_capacity(header.n);
        let mut draws = header.retain_draws.then(|| Vec::with_capacity(header.n * k));
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| Error::MalformedPool { line: idx + 1, reason };
            let rec: PoolRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            if rec.i != h.len() {
                return Err(bad(format!("expected draw {}, found {}", h.len(), rec.i)));
            }
            if let Some(d) = draws.as_mut() {
                let x = rec.x.ok_or_else(|| bad("missing draw values".into()))?;
                if x.len() != k {
                    return Err(bad(format!("draw has {} entries, expected {k}", x.len())));
                }
                d.extend(x);
            }
            h.push(rec.h);
            b.push(rec.b);
            log_q.push(rec.log_q);
            slx.push(rec.sum_log_x);
        }
        if h.len() != header.n {
            return Err(Error::MalformedPool {
                line: h.len() + 1,
                reason: format!("expected {} draws, found {}", header.n, h.len()),
            });
        }
        header.proposal.layout(&header.theta)?;
        Self::assemble(
            header.theta,
            header.proposal,
            header.seed,
            header.ess_floor,
            h,
            b,
            log_q,
            slx,
            draws,
        )
    }
}

const POOL_FORMAT: &str = "wfsel-pool/1";

#[derive(Serialize, Deserialize)]
struct PoolHeader {
    format: String,
    seed: u64,
    theta: MutationParams,
    proposal: Proposal,
    n: usize,
    k: usize,
    ess_floor: f64,
    retain_draws: bool,
}

#[derive(Serialize, Deserialize)]
struct PoolRecord {
    i: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    x: Option<Vec<f64>>,
    h: f64,
    b: f64,
    log_q: f64,
    sum_log_x: f64,
}
