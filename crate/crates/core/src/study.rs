//! Drivers that regenerate the figure data: the MLE-versus-homozygosity
//! curve, sampling distributions, bootstrap and posterior histograms,
//! homozygosity CDF panels and the instability-region probabilities.
//!
//! Each study writes a CSV table plus a JSON sidecar holding the spec and
//! summary numbers. Outputs are byte-identical across replays of a spec.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{cdf_homozygosity, quantile_homozygosity, reweigh_symmetric_masses, PoolConfig, Proposal, WeightedPool};
use crate::error::{Error, Result};
use crate::inference::{
    bootstrap, posterior_sample, posterior_summary, BootstrapConfig, IntervalEstimate, JointConfig, MleConfig,
    MleResult, MleStatus, PosteriorConfig, PosteriorMode, PriorBounds, SigmaInverter,
};
use crate::model::{parse_frequencies, Homozygosity, MutationParams};
use crate::sampler::{sample_selection, SamplerConfig};
use crate::stream::{substream, Stream};

fn default_pool_size() -> usize {
    100_000
}

fn default_level() -> f64 {
    0.95
}

fn default_bins() -> usize {
    60
}

/// One study, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StudyKind {
    MleCurve {
        k: usize,
        theta: f64,
        /// Defaults to 100 points on `[1/k + 0.002, 0.5]`.
        #[serde(default)]
        h_grid: Option<Vec<f64>>,
        #[serde(default = "default_pool_size")]
        pool_size: usize,
    },
    SamplingDist {
        k: usize,
        theta: f64,
        sigma: f64,
        n_datasets: usize,
        #[serde(default = "default_pool_size")]
        pool_size: usize,
    },
    BootstrapHist {
        k: usize,
        theta: f64,
        sigma: f64,
        m: usize,
        #[serde(default = "default_level")]
        level: f64,
        #[serde(default = "default_bins")]
        bins: usize,
        #[serde(default = "default_pool_size")]
        pool_size: usize,
    },
    CdfPanel {
        /// Dataset name or comma-separated frequencies.
        data: String,
        theta: f64,
        sigma_values: Vec<f64>,
        #[serde(default = "default_bins")]
        bins: usize,
        #[serde(default = "default_pool_size")]
        pool_size: usize,
    },
    PosteriorHist {
        data: String,
        #[serde(default)]
        fix_theta: Option<f64>,
        #[serde(default)]
        prior: PriorBounds,
        chain_length: usize,
        #[serde(default = "default_level")]
        level: f64,
        #[serde(default = "default_bins")]
        bins: usize,
    },
    InstabilityProb {
        k: usize,
        theta: f64,
        sigma_grid: Vec<f64>,
        epsilon: f64,
        n_per_sigma: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    #[serde(flatten)]
    pub kind: StudyKind,
    pub seed: u64,
    /// CSV path; the sidecar is written next to it with a `.json` extension.
    pub output: PathBuf,
}

fn sorted_non_empty(name: &str, grid: &[f64], problems: &mut Vec<String>) {
    if grid.is_empty() {
        problems.push(format!("{name}: grid must not be empty"));
    } else if grid.iter().any(|v| !v.is_finite()) {
        problems.push(format!("{name}: grid values must be finite"));
    } else if grid.windows(2).any(|w| w[0] >= w[1]) {
        problems.push(format!("{name}: grid must be strictly increasing"));
    }
}

fn replicates(name: &str, n: usize, problems: &mut Vec<String>) {
    if n < 100 {
        problems.push(format!("{name}: at least 100 replicates required, got {n}"));
    }
}

fn positive(name: &str, v: f64, problems: &mut Vec<String>) {
    if !(v.is_finite() && v > 0.0) {
        problems.push(format!("{name}: must be positive, got {v}"));
    }
}

fn alleles(k: usize, problems: &mut Vec<String>) {
    if k < 2 {
        problems.push(format!("k: at least 2 alleles required, got {k}"));
    }
}

impl StudySpec {
    /// Every violated constraint, by field name.
    pub fn validate(&self) -> Result<()> {
        let mut p = Vec::new();
        match &self.kind {
            StudyKind::MleCurve { k, theta, h_grid, pool_size } => {
                alleles(*k, &mut p);
                positive("theta", *theta, &mut p);
                if let Some(grid) = h_grid {
                    sorted_non_empty("h_grid", grid, &mut p);
                    if *k >= 2 && grid.iter().any(|&h| h <= 1.0 / *k as f64 || h >= 1.0) {
                        p.push(format!("h_grid: points must lie in (1/k, 1) = ({}, 1)", 1.0 / *k as f64));
                    }
                }
                if *pool_size == 0 {
                    p.push("pool_size: must be positive".into());
                }
            }
            StudyKind::SamplingDist { k, theta, sigma, n_datasets, .. } => {
                alleles(*k, &mut p);
                positive("theta", *theta, &mut p);
                if !sigma.is_finite() {
                    p.push("sigma: must be finite".into());
                }
                replicates("n_datasets", *n_datasets, &mut p);
            }
            StudyKind::BootstrapHist { k, theta, sigma, m, level, bins, .. } => {
                alleles(*k, &mut p);
                positive("theta", *theta, &mut p);
                if !sigma.is_finite() {
                    p.push("sigma: must be finite".into());
                }
                replicates("m", *m, &mut p);
                if !(*level > 0.0 && *level < 1.0) {
                    p.push(format!("level: must lie in (0, 1), got {level}"));
                }
                if *bins == 0 {
                    p.push("bins: must be positive".into());
                }
            }
            StudyKind::CdfPanel { data, theta, sigma_values, bins, .. } => {
                if let Err(e) = parse_frequencies(data) {
                    p.push(format!("data: {e}"));
                }
                positive("theta", *theta, &mut p);
                sorted_non_empty("sigma_values", sigma_values, &mut p);
                if *bins == 0 {
                    p.push("bins: must be positive".into());
                }
            }
            StudyKind::PosteriorHist { data, fix_theta, prior, chain_length, level, bins } => {
                if let Err(e) = parse_frequencies(data) {
                    p.push(format!("data: {e}"));
                }
                if let Err(e) = prior.validate() {
                    p.push(format!("prior: {e}"));
                }
                if let Some(t) = fix_theta {
                    positive("fix_theta", *t, &mut p);
                }
                if *chain_length < 1_000 {
                    p.push(format!("chain_length: at least 1000 draws required, got {chain_length}"));
                }
                if !(*level > 0.0 && *level < 1.0) {
                    p.push(format!("level: must lie in (0, 1), got {level}"));
                }
                if *bins == 0 {
                    p.push("bins: must be positive".into());
                }
            }
            StudyKind::InstabilityProb { k, theta, sigma_grid, epsilon, n_per_sigma } => {
                alleles(*k, &mut p);
                positive("theta", *theta, &mut p);
                sorted_non_empty("sigma_grid", sigma_grid, &mut p);
                if *k >= 2 && !(*epsilon > 0.0 && *epsilon < 1.0 - 1.0 / *k as f64) {
                    p.push(format!("epsilon: must lie in (0, 1 - 1/k), got {epsilon}"));
                }
                replicates("n_per_sigma", *n_per_sigma, &mut p);
            }
        }
        if self.output.as_os_str().is_empty() {
            p.push("output: path must not be empty".into());
        }
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(p))
        }
    }

    /// Parses and validates a JSON spec. Unknown fields are errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::InvalidSpec(vec![e.to_string()]))?;
        let spec: StudySpec = serde_json::from_value(raw.clone()).map_err(|e| Error::InvalidSpec(vec![e.to_string()]))?;
        let known = serde_json::to_value(&spec)?;
        let unknown: Vec<String> = raw
            .as_object()
            .into_iter()
            .flat_map(|m| m.keys())
            .filter(|key| known.get(key.as_str()).is_none())
            .map(|key| format!("{key}: unknown field for kind {}", known["kind"]))
            .collect();
        if !unknown.is_empty() {
            return Err(Error::InvalidSpec(unknown));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn sidecar_path(&self) -> PathBuf {
        self.output.with_extension("json")
    }
}

fn defensive_pool(theta: f64, k: usize, size: usize, seed: u64) -> Result<WeightedPool> {
    let params = MutationParams::symmetric(theta, k)?;
    let cfg = PoolConfig::with_size(size)
        .proposal(Proposal::defensive(&params))
        .retain_draws(false);
    WeightedPool::build(&params, &cfg, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub h: f64,
    #[serde(with = "crate::inference::real")]
    pub sigma_hat: f64,
    pub status: MleStatus,
}

/// Default grid: 100 points on `[1/k + 0.002, 0.5]`.
pub fn default_h_grid(k: usize) -> Vec<f64> {
    let lo = 1.0 / k as f64 + 0.002;
    let hi = 0.5_f64.max(lo + 0.01);
    (0..100).map(|j| lo + (hi - lo) * j as f64 / 99.0).collect()
}

/// `sigma_hat(h)` across a homozygosity grid on one pool; non-increasing in
/// `h`.
pub fn mle_curve(k: usize, h_grid: &[f64], pool: &WeightedPool) -> Result<Vec<CurveRow>> {
    if pool.k() != k {
        return Err(Error::DimensionMismatch { expected: k, found: pool.k() });
    }
    let hs = h_grid
        .iter()
        .map(|&h| {
            if h <= 1.0 / k as f64 {
                Err(crate::error::invalid(format!("grid point {h} is not above 1/k")))
            } else {
                Homozygosity::new(h, k)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let inverter = SigmaInverter::new(pool, MleConfig::default(), 2_000)?;
    Ok(hs
        .par_iter()
        .map(|&h| {
            let fit = inverter.invert(h);
            CurveRow { h: h.value(), sigma_hat: fit.sigma_hat, status: fit.status }
        })
        .collect())
}

/// `sigma_hat` for `n` populations drawn at `(theta, sigma)`, each fitted
/// with `theta` known.
pub fn sampling_distribution(
    theta: f64,
    sigma: f64,
    k: usize,
    n: usize,
    seed: u64,
    pool_size: usize,
) -> Result<Vec<MleResult>> {
    if n < 100 {
        return Err(crate::error::invalid(format!("need at least 100 data sets, got {n}")));
    }
    let params = MutationParams::symmetric(theta, k)?;
    let (data, _) = sample_selection(&params, sigma, n, substream(seed, Stream::Study, 0), &SamplerConfig::default())?;
    let pool = defensive_pool(theta, k, pool_size, substream(seed, Stream::Study, 1))?;
    let inverter = SigmaInverter::new(&pool, MleConfig::default(), 2_000)?;
    Ok(data.par_iter().map(|x| inverter.invert(x.homozygosity())).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstabilityRow {
    pub sigma: f64,
    /// Share of draws at `+sigma` with `H` in `(1/k, 1/k + epsilon)`.
    pub hetero_hit_fraction: f64,
    /// Share of draws at `-sigma` with `H` in `(1 - epsilon, 1)`.
    pub homo_hit_fraction: f64,
    pub n: usize,
}

/// Probability of landing in either instability region, under
/// heterozygote advantage `+sigma` and homozygote advantage `-sigma`.
pub fn instability_probability(
    k: usize,
    theta: f64,
    sigma_grid: &[f64],
    epsilon: f64,
    n_per_sigma: usize,
    seed: u64,
) -> Result<Vec<InstabilityRow>> {
    let lo = 1.0 / k as f64;
    if !(epsilon > 0.0 && epsilon < 1.0 - lo) {
        return Err(crate::error::invalid(format!("epsilon must lie in (0, 1 - 1/k), got {epsilon}")));
    }
    let params = MutationParams::symmetric(theta, k)?;
    let config = SamplerConfig::default();
    sigma_grid
        .iter()
        .enumerate()
        .map(|(j, &sigma)| {
            let hit = |s: f64, stream: u64, inside: &dyn Fn(f64) -> bool| -> Result<f64> {
                let (draws, _) = sample_selection(&params, s, n_per_sigma, substream(seed, Stream::Study, stream), &config)?;
                let hits = draws.iter().filter(|x| inside(x.homozygosity().value())).count();
                Ok(hits as f64 / n_per_sigma as f64)
            };
            let hetero = hit(sigma.abs(), 2 * j as u64, &|h| h > lo && h < lo + epsilon)?;
            let homo = hit(-sigma.abs(), 2 * j as u64 + 1, &|h| h > 1.0 - epsilon && h < 1.0)?;
            Ok(InstabilityRow { sigma, hetero_hit_fraction: hetero, homo_hit_fraction: homo, n: n_per_sigma })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfPanelRow {
    pub sigma: f64,
    /// `P(H <= h | sigma)`.
    pub cdf_at_h: f64,
    pub q025: f64,
    pub q975: f64,
    pub ess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub series: f64,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub mass: f64,
}

/// Weighted distribution of `H` at each `sigma`: summary rows with the CDF
/// at `h` and the 2.5% / 97.5% quantiles, and histogram rows over
/// `[1/k, 1]`.
pub fn cdf_panel(h: Homozygosity, pool: &WeightedPool, sigma_values: &[f64], bins: usize) -> (Vec<CdfPanelRow>, Vec<HistogramRow>) {
    let lo = 1.0 / pool.k() as f64;
    let width = (1.0 - lo) / bins as f64;
    let mut summary = Vec::with_capacity(sigma_values.len());
    let mut hist = Vec::with_capacity(sigma_values.len() * bins);
    for &sigma in sigma_values {
        let cdf = cdf_homozygosity(pool, sigma, h);
        summary.push(CdfPanelRow {
            sigma,
            cdf_at_h: cdf.value,
            q025: quantile_homozygosity(pool, sigma, 0.025),
            q975: quantile_homozygosity(pool, sigma, 0.975),
            ess: cdf.ess.ess,
        });
        let masses = reweigh_symmetric_masses(pool, sigma, bins, lo, width);
        for (b, mass) in masses.into_iter().enumerate() {
            hist.push(HistogramRow {
                series: sigma,
                bin_lo: lo + b as f64 * width,
                bin_hi: lo + (b + 1) as f64 * width,
                mass,
            });
        }
    }
    (summary, hist)
}

/// Equal-width histogram of the finite values; each row's mass is a share
/// of all values, so non-finite ones account for the missing mass.
pub fn histogram(values: &[f64], bins: usize, series: f64) -> Vec<HistogramRow> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in &finite {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| HistogramRow {
            series,
            bin_lo: lo + b as f64 * width,
            bin_hi: lo + (b + 1) as f64 * width,
            mass: c as f64 / values.len() as f64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutcome {
    pub tables: Vec<PathBuf>,
    pub sidecar: PathBuf,
    pub summary: serde_json::Value,
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SampleRow {
    replicate: usize,
    #[serde(with = "crate::inference::real")]
    sigma_hat: f64,
    status: MleStatus,
}

fn sample_rows(fits: &[MleResult]) -> Vec<SampleRow> {
    fits.iter()
        .enumerate()
        .map(|(replicate, f)| SampleRow { replicate, sigma_hat: f.sigma_hat, status: f.status })
        .collect()
}

fn status_counts(fits: &[MleResult]) -> serde_json::Value {
    let count = |s: MleStatus| fits.iter().filter(|f| f.status == s).count();
    serde_json::json!({
        "converged": count(MleStatus::Converged),
        "unbounded_above": count(MleStatus::UnboundedAbove),
        "unbounded_below": count(MleStatus::UnboundedBelow),
        "outside_pool_range": count(MleStatus::OutsidePoolRange),
    })
}

fn interval_json(ci: &IntervalEstimate) -> serde_json::Value {
    serde_json::to_value(ci).expect("interval serializes")
}

fn hist_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("study");
    output.with_file_name(format!("{stem}.hist.csv"))
}

/// Runs a validated spec, writing its tables and sidecar.
pub fn run_study(spec: &StudySpec) -> Result<StudyOutcome> {
    spec.validate()?;
    let seed = spec.seed;
    let out = &spec.output;
    let mut tables = vec![out.clone()];
    let summary = match &spec.kind {
        StudyKind::MleCurve { k, theta, h_grid, pool_size } => {
            let grid = h_grid.clone().unwrap_or_else(|| default_h_grid(*k));
            let pool = defensive_pool(*theta, *k, *pool_size, substream(seed, Stream::Study, 1))?;
            let rows = mle_curve(*k, &grid, &pool)?;
            write_csv(out, &rows)?;
            serde_json::json!({ "points": rows.len(), "statuses": rows.iter().filter(|r| r.status != MleStatus::Converged).count() })
        }
        StudyKind::SamplingDist { k, theta, sigma, n_datasets, pool_size } => {
            let fits = sampling_distribution(*theta, *sigma, *k, *n_datasets, seed, *pool_size)?;
            write_csv(out, &sample_rows(&fits))?;
            let mut v: Vec<f64> = fits.iter().map(|f| f.sigma_hat).collect();
            v.sort_by(f64::total_cmp);
            let q = |p| crate::inference::quantile_sorted(&v, p);
            serde_json::json!({
                "statuses": status_counts(&fits),
                "median": q(0.5),
                "q99": real_json(q(0.99)),
            })
        }
        StudyKind::BootstrapHist { k, theta, sigma, m, level, bins, pool_size } => {
            let cfg = BootstrapConfig { level: *level, pool_size: *pool_size, ..BootstrapConfig::default() };
            let result = bootstrap(*theta, *sigma, *k, *m, seed, &cfg)?;
            write_csv(out, &sample_rows(&result.estimates))?;
            let hp = hist_path(out);
            write_csv(&hp, &histogram(&result.sigma_hats(), *bins, *sigma))?;
            tables.push(hp);
            serde_json::json!({
                "standard_error": real_json(result.standard_error),
                "standard_error_undefined": result.standard_error_undefined,
                "interval": interval_json(&result.percentile_interval),
                "statuses": status_counts(&result.estimates),
                "sampler": result.sampler,
            })
        }
        StudyKind::CdfPanel { data, theta, sigma_values, bins, pool_size } => {
            let x = parse_frequencies(data)?;
            let pool = defensive_pool(*theta, x.k(), *pool_size, substream(seed, Stream::Study, 1))?;
            let (rows, hist) = cdf_panel(x.homozygosity(), &pool, sigma_values, *bins);
            write_csv(out, &rows)?;
            let hp = hist_path(out);
            write_csv(&hp, &hist)?;
            tables.push(hp);
            serde_json::json!({ "h": x.homozygosity().value(), "k": x.k() })
        }
        StudyKind::PosteriorHist { data, fix_theta, prior, chain_length, level, bins } => {
            let x = parse_frequencies(data)?;
            let mode = match fix_theta {
                Some(theta) => PosteriorMode::FixedTheta { theta: *theta },
                None => PosteriorMode::Joint,
            };
            let cfg = PosteriorConfig { mode, ..PosteriorConfig::default() };
            let chain = posterior_sample(&x, prior, *chain_length, seed, &cfg)?;
            let joint = JointConfig { pool_size: 200_000, ..JointConfig::default() };
            let summary = posterior_summary(&chain, *level, &x, seed, &joint)?;
            let mut rows = histogram(&chain.sigmas(), *bins, 0.0);
            if fix_theta.is_none() {
                rows.extend(histogram(&chain.thetas(), *bins, 1.0));
            }
            write_csv(out, &rows)?;
            serde_json::json!({
                "interval": interval_json(&summary.interval),
                "mode": summary.mode,
                "acceptance_rate": chain.acceptance_rate,
                "mistuned": chain.mistuned,
                "min_ess": chain.min_ess,
                "proposal": chain.proposal_spec,
                "prior": chain.prior_bounds,
                "series": if fix_theta.is_none() { "0 = sigma, 1 = theta" } else { "0 = sigma" },
            })
        }
        StudyKind::InstabilityProb { k, theta, sigma_grid, epsilon, n_per_sigma } => {
            let rows = instability_probability(*k, *theta, sigma_grid, *epsilon, *n_per_sigma, seed)?;
            write_csv(out, &rows)?;
            let lo = 1.0 / *k as f64;
            serde_json::json!({
                "hetero_region": [lo, lo + epsilon],
                "homo_region": [1.0 - epsilon, 1.0],
            })
        }
    };
    let sidecar = spec.sidecar_path();
    let mut w = BufWriter::new(File::create(&sidecar)?);
    serde_json::to_writer_pretty(&mut w, &serde_json::json!({ "spec": spec, "summary": summary }))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(StudyOutcome { tables, sidecar, summary })
}

fn real_json(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(if v > 0.0 { "inf" } else { "-inf" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_errors_list_fields() {
        let spec = StudySpec {
            kind: StudyKind::InstabilityProb { k: 10, theta: 5.0, sigma_grid: vec![], epsilon: 0.95, n_per_sigma: 10 },
            seed: 1,
            output: "x.csv".into(),
        };
        match spec.validate() {
            Err(Error::InvalidSpec(problems)) => {
                assert_eq!(problems.len(), 3, "{problems:?}");
                assert!(problems[0].starts_with("sigma_grid"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spec_json_shape() {
        let text = r#"{"kind": "mle_curve", "k": 20, "theta": 5, "seed": 3, "output": "curve.csv"}"#;
        let spec = StudySpec::from_json(text).unwrap();
        assert!(matches!(spec.kind, StudyKind::MleCurve { k: 20, .. }));
        assert!(StudySpec::from_json(r#"{"kind": "mle_curve", "k": 20}"#).is_err());
        let typo = r#"{"kind": "mle_curve", "k": 20, "theta": 5, "seed": 3, "output": "c.csv", "tehta": 1}"#;
        match StudySpec::from_json(typo) {
            Err(Error::InvalidSpec(p)) => assert!(p[0].starts_with("tehta")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn curve_is_monotone() {
        let pool = defensive_pool(5.0, 20, 20_000, 1).unwrap();
        let rows = mle_curve(20, &default_h_grid(20), &pool).unwrap();
        for w in rows.windows(2) {
            assert!(w[0].sigma_hat >= w[1].sigma_hat);
        }
        assert!(mle_curve(20, &[0.04], &pool).is_err());
    }

    #[test]
    fn histogram_masses() {
        let rows = histogram(&[0.0, 1.0, 2.0, f64::INFINITY], 2, 0.0);
        assert_eq!(rows.len(), 2);
        let total: f64 = rows.iter().map(|r| r.mass).sum();
        assert!((total - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zero_sigma_panel_is_neutral_histogram() {
        let params = MutationParams::symmetric(4.8, 4).unwrap();
        let pool = WeightedPool::build(&params, &PoolConfig::with_size(5_000), 2).unwrap();
        let (rows, hist) = cdf_panel(Homozygosity::new(0.288, 4).unwrap(), &pool, &[0.0], 10);
        let share = pool.homozygosities().iter().filter(|&&h| h <= 0.288).count() as f64 / 5_000.0;
        assert!((rows[0].cdf_at_h - share).abs() < 1e-12);
        let total: f64 = hist.iter().map(|r| r.mass).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
