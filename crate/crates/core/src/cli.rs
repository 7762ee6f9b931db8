//! Command-line front end: `simulate`, `analyze` and `study`.
//!
//! Summaries go to standard output. Machine-readable run records go to the
//! `--out` / `--record` paths and carry everything needed to replay a run.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::density::{PoolConfig, Proposal, WeightedPool};
use crate::error::{invalid, Error, Result};
use crate::inference::{
    bootstrap, mle_joint, mle_sigma_with, monotone_ci, posterior_sample, posterior_summary, write_chain_csv,
    BootstrapConfig, JointConfig, MleConfig, MleResult, MleStatus, PosteriorConfig, PosteriorMode, PriorBounds,
};
use crate::model::{parse_frequencies, datasets, MutationParams, SimplexPoint};
use crate::sampler::{sample_neutral, sample_selection, write_samples_jsonl, SamplerConfig};
use crate::study::{run_study, StudySpec};

pub const RUN_RECORD_SCHEMA: &str = "wfsel-run/1";

#[derive(Debug, Parser)]
#[command(name = "wfsel", version, about = "Selection inference for Wright-Fisher k-allele models")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "WFSEL_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw populations from the neutral or selected stationary law.
    Simulate(SimulateArgs),
    /// Fit a data set: MLE, bootstrap, exact interval or posterior.
    Analyze(AnalyzeArgs),
    /// Run a study spec and write its tables.
    Study(StudyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub theta: f64,
    /// Omit, or pass 0, for neutral draws.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub n: usize,
    /// Drawn from system entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON-lines sample file.
    #[arg(long)]
    pub out: PathBuf,
    /// Run record path (default: `<out>.run.json`).
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mle,
    Bootstrap,
    MonotoneCi,
    Posterior,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    /// `lyme`, `kir`, a frequency file (text or JSON), or inline frequencies.
    #[arg(long)]
    pub data: String,
    /// Data set to use when the file holds several.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Total tail probability of the interval (bootstrap, monotone-ci,
    /// posterior), split equally between the tails.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bootstrap replicates.
    #[arg(long)]
    pub m: Option<usize>,
    /// Re-estimate theta in every bootstrap replicate.
    #[arg(long)]
    pub joint_replicates: bool,
    /// Posterior draws kept after burn-in.
    #[arg(long)]
    pub chain_length: Option<usize>,
    /// Uniform prior for theta as `lo,hi` (posterior).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub prior_theta: Option<(f64, f64)>,
    /// Uniform prior for sigma as `lo,hi` (posterior).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub prior_sigma: Option<(f64, f64)>,
    /// Condition on this theta instead of estimating it.
    #[arg(long)]
    pub fix_theta: Option<f64>,
    /// Importance-sampling pool size (default depends on the method).
    #[arg(long, env = "WFSEL_POOL_SIZE")]
    pub pool_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run record path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV dump of the posterior chain.
    #[arg(long)]
    pub chain_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StudyArgs {
    /// StudySpec JSON file.
    pub spec: PathBuf,
    /// Run record path (default: next to the spec's output).
    #[arg(long)]
    pub record: Option<PathBuf>,
}

fn parse_pair(text: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected lo,hi but got {text:?}"));
    }
    let lo = parts[0].parse::<f64>().map_err(|e| e.to_string())?;
    let hi = parts[1].parse::<f64>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

/// Dataset identity recorded with every analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub label: String,
    /// FNV-1a of the frequencies' bit patterns, hex.
    pub hash: String,
    pub k: usize,
    pub homozygosity: f64,
    pub frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub version: String,
    pub command: String,
    /// Resolved flags, including defaults and the effective seed.
    pub flags: Value,
    pub inputs: Option<DatasetInfo>,
    pub seed: Option<u64>,
    pub config: Value,
    pub outputs: Value,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub label: String,
    pub point: SimplexPoint,
}

fn fnv1a(values: &[f64]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for byte in v.to_bits().to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{hash:016x}")
}

impl Dataset {
    pub fn info(&self) -> DatasetInfo {
        DatasetInfo {
            label: self.label.clone(),
            hash: fnv1a(self.point.values()),
            k: self.point.k(),
            homozygosity: self.point.homozygosity().value(),
            frequencies: self.point.values().to_vec(),
        }
    }
}

#[derive(Deserialize)]
struct JsonDataset {
    k: Option<usize>,
    frequencies: Vec<f64>,
    label: Option<String>,
}

fn from_json_dataset(d: JsonDataset, fallback: String) -> Result<Dataset> {
    let point = SimplexPoint::with_tolerance(d.frequencies, SimplexPoint::INGEST_TOLERANCE)?;
    if let Some(k) = d.k {
        if k != point.k() {
            return Err(Error::DimensionMismatch { expected: k, found: point.k() });
        }
    }
    Ok(Dataset { label: d.label.unwrap_or(fallback), point })
}

/// Reads frequency data sets: one per line (comma or whitespace separated,
/// `#` comments allowed), or JSON `{"k", "frequencies", "label"}` objects,
/// alone or in an array.
pub fn parse_datasets(text: &str, origin: &str) -> Result<Vec<Dataset>> {
    let trimmed = text.trim_start();
    let sets = if trimmed.starts_with('{') {
        let d: JsonDataset = serde_json::from_str(text)?;
        vec![from_json_dataset(d, origin.to_string())?]
    } else if trimmed.starts_with('[') {
        let ds: Vec<JsonDataset> = serde_json::from_str(text)?;
        ds.into_iter()
            .enumerate()
            .map(|(i, d)| from_json_dataset(d, format!("{origin}#{i}")))
            .collect::<Result<_>>()?
    } else {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, l)| Ok(Dataset { label: format!("{origin}#{i}"), point: parse_frequencies(l)? }))
            .collect::<Result<_>>()?
    };
    if sets.is_empty() {
        return Err(invalid(format!("no data sets in {origin}")));
    }
    Ok(sets)
}

/// Resolves `--data`: a bundled name, a file, or inline frequencies.
pub fn load_dataset(spec: &str, index: usize) -> Result<Dataset> {
    if let Some(point) = datasets::by_name(spec) {
        return Ok(Dataset { label: spec.trim().to_ascii_lowercase(), point });
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let mut sets = parse_datasets(&text, spec)?;
        if index >= sets.len() {
            return Err(invalid(format!("--index {index} but {spec} holds {} data sets", sets.len())));
        }
        return Ok(sets.swap_remove(index));
    }
    Ok(Dataset { label: "inline".into(), point: parse_frequencies(spec)? })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn append_extension(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<RunRecord> {
    let start = Instant::now();
    if args.n == 0 {
        return Err(invalid("--n must be at least 1"));
    }
    let seed = resolve_seed(args.seed);
    let theta = MutationParams::symmetric(args.theta, args.k)?;
    let sampler = SamplerConfig::default();
    let (points, report) = match args.sigma.filter(|&s| s != 0.0) {
        None => (sample_neutral(&theta, args.n, seed)?, None),
        Some(sigma) => {
            let (p, r) = sample_selection(&theta, sigma, args.n, seed, &sampler)?;
            (p, Some(r))
        }
    };
    write_samples_jsonl(&points, BufWriter::new(File::create(&args.out)?))?;
    let method = report.as_ref().map_or("neutral".to_string(), |r| {
        serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    });
    writeln!(out, "wrote {} draws to {} (method: {method})", points.len(), args.out.display())?;
    if let Some(r) = &report {
        writeln!(out, "proposals {}, acceptance rate {:.4}", r.n_proposals, r.acceptance_rate)?;
        if r.low_acceptance {
            writeln!(out, "warning: low MH acceptance rate")?;
        }
    }
    let mean_h = points.iter().map(|p| p.homozygosity().value()).sum::<f64>() / points.len() as f64;
    writeln!(out, "mean homozygosity {mean_h:.5}")?;
    let mut flags = serde_json::to_value(args)?;
    flags["seed"] = json!(seed);
    let record = RunRecord {
        schema: RUN_RECORD_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "simulate".into(),
        flags,
        inputs: None,
        seed: Some(seed),
        config: json!({ "sampler": sampler }),
        outputs: json!({ "samples": args.out, "n": points.len(), "report": report, "mean_homozygosity": mean_h }),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    let path = args.record.clone().unwrap_or_else(|| append_extension(&args.out, ".run.json"));
    write_json(&path, &record)?;
    Ok(record)
}

fn check_method_flags(args: &AnalyzeArgs) -> Result<()> {
    let mut bad = Vec::new();
    let method = args.method;
    let only = |set: bool, name: &str, allowed: &[Method], bad: &mut Vec<String>| {
        if set && !allowed.contains(&method) {
            bad.push(name.to_string());
        }
    };
    only(args.alpha.is_some(), "--alpha", &[Method::Bootstrap, Method::MonotoneCi, Method::Posterior], &mut bad);
    only(args.m.is_some(), "--m", &[Method::Bootstrap], &mut bad);
    only(args.joint_replicates, "--joint-replicates", &[Method::Bootstrap], &mut bad);
    only(args.chain_length.is_some(), "--chain-length", &[Method::Posterior], &mut bad);
    only(args.prior_theta.is_some(), "--prior-theta", &[Method::Posterior], &mut bad);
    only(args.prior_sigma.is_some(), "--prior-sigma", &[Method::Posterior], &mut bad);
    only(args.chain_csv.is_some(), "--chain-csv", &[Method::Posterior], &mut bad);
    if !bad.is_empty() {
        let name = serde_json::to_value(method)?;
        return Err(invalid(format!("{} not valid with --method {}", bad.join(", "), name.as_str().unwrap_or("?"))));
    }
    if let Some(a) = args.alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid(format!("--alpha must lie in (0, 1), got {a}")));
        }
    }
    Ok(())
}

fn describe(fit: &MleResult) -> String {
    let status = serde_json::to_value(fit.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    match fit.status {
        MleStatus::Converged => format!("sigma_hat = {:.4} ({status})", fit.sigma_hat),
        MleStatus::OutsidePoolRange => format!("sigma_hat beyond the search range, reported at {} ({status})", fit.sigma_hat),
        _ => format!("sigma_hat = {} ({status}): the likelihood has no finite maximum", fit.sigma_hat),
    }
}

/// Conditional fit at `theta` or joint fit over `(theta, sigma)`.
fn fit(x: &SimplexPoint, fix_theta: Option<f64>, pool_size: usize, seed: u64) -> Result<MleResult> {
    match fix_theta {
        Some(theta) => {
            let params = MutationParams::symmetric(theta, x.k())?;
            let cfg = PoolConfig::with_size(pool_size).proposal(Proposal::defensive(&params)).retain_draws(false);
            let pool = WeightedPool::build(&params, &cfg, seed)?;
            let mut r = mle_sigma_with(x.homozygosity(), &pool, &MleConfig::default())?;
            r.theta_hat = Some(theta);
            Ok(r)
        }
        None => mle_joint(x, seed, &JointConfig { pool_size, ..JointConfig::default() }),
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<RunRecord> {
    let start = Instant::now();
    check_method_flags(args)?;
    let data = load_dataset(&args.data, args.index)?;
    let x = &data.point;
    let seed = resolve_seed(args.seed);
    let alpha = args.alpha.unwrap_or(0.05);
    writeln!(out, "data {} (k = {}, h = {:.4})", data.label, x.k(), x.homozygosity().value())?;

    let (config, outputs) = match args.method {
        Method::Mle => {
            let pool_size = args.pool_size.unwrap_or(1_000_000);
            let r = fit(x, args.fix_theta, pool_size, seed)?;
            writeln!(out, "theta_hat = {:.4}{}", r.theta_hat.unwrap_or(f64::NAN), if args.fix_theta.is_some() { " (fixed)" } else { "" })?;
            writeln!(out, "{}", describe(&r))?;
            if r.outer_converged == Some(false) {
                writeln!(out, "warning: profile optimum at the edge of the theta range")?;
            }
            (json!({ "pool_size": pool_size }), json!({ "fit": r }))
        }
        Method::MonotoneCi => {
            let pool_size = args.pool_size.unwrap_or(1_000_000);
            let theta = match args.fix_theta {
                Some(t) => t,
                None => {
                    let r = fit(x, None, pool_size, seed)?;
                    writeln!(out, "theta estimated jointly: {:.4}", r.theta_hat.unwrap_or(f64::NAN))?;
                    r.theta_hat.ok_or_else(|| invalid("joint fit produced no theta"))?
                }
            };
            let params = MutationParams::symmetric(theta, x.k())?;
            let cfg = PoolConfig::with_size(pool_size).proposal(Proposal::defensive(&params)).retain_draws(false);
            let pool = WeightedPool::build(&params, &cfg, seed)?;
            let ci = monotone_ci(x.homozygosity(), &pool, alpha / 2.0, alpha / 2.0)?;
            writeln!(out, "{:.0}% exact interval at theta = {theta}: ({:.3}, {:.3})", 100.0 * ci.level, ci.lower, ci.upper)?;
            for a in &ci.advisories {
                writeln!(out, "advisory: {a}")?;
            }
            (json!({ "pool_size": pool_size, "theta": theta, "alpha": alpha }), json!({ "interval": ci }))
        }
        Method::Bootstrap => {
            let fit_pool = args.pool_size.unwrap_or(1_000_000);
            let r = fit(x, args.fix_theta, fit_pool, seed)?;
            writeln!(out, "fit: theta_hat = {:.4}, {}", r.theta_hat.unwrap_or(f64::NAN), describe(&r))?;
            if r.status != MleStatus::Converged {
                writeln!(out, "no bootstrap: the fitted sigma is not finite")?;
                (json!({ "pool_size": fit_pool }), json!({ "fit": r, "bootstrap": Value::Null }))
            } else {
                let m = args.m.unwrap_or(10_000);
                let theta = r.theta_hat.unwrap_or(f64::NAN);
                let mut cfg = BootstrapConfig { level: 1.0 - alpha, joint: args.joint_replicates, ..BootstrapConfig::default() };
                if let Some(p) = args.pool_size {
                    cfg.pool_size = p;
                }
                let b = bootstrap(theta, r.sigma_hat, x.k(), m, seed, &cfg)?;
                let ci = &b.percentile_interval;
                writeln!(out, "{:.0}% percentile interval ({:.3}, {:.3})", 100.0 * ci.level, ci.lower, ci.upper)?;
                writeln!(
                    out,
                    "standard error {:.3}{} over {} converged replicates; {} unbounded, {} beyond range",
                    b.standard_error,
                    if b.standard_error_undefined { " (undefined: heavy tail)" } else { "" },
                    m - b.n_unbounded - b.n_outside_range,
                    b.n_unbounded,
                    b.n_outside_range
                )?;
                (json!({ "fit_pool_size": fit_pool, "bootstrap": cfg }), json!({ "fit": r, "bootstrap": b }))
            }
        }
        Method::Posterior => {
            let defaults = PriorBounds::default();
            let prior = PriorBounds {
                theta: args.prior_theta.unwrap_or(defaults.theta),
                sigma: args.prior_sigma.unwrap_or(defaults.sigma),
            };
            let mode = match args.fix_theta {
                Some(theta) => PosteriorMode::FixedTheta { theta },
                None => PosteriorMode::Joint,
            };
            let mut cfg = PosteriorConfig { mode, ..PosteriorConfig::default() };
            if let Some(p) = args.pool_size {
                cfg.pool_size = p;
            }
            let length = args.chain_length.unwrap_or(100_000);
            let chain = posterior_sample(x, &prior, length, seed, &cfg)?;
            let joint = JointConfig { pool_size: 200_000, ..JointConfig::default() };
            let summary = posterior_summary(&chain, 1.0 - alpha, x, seed, &joint)?;
            writeln!(
                out,
                "prior theta ({}, {}], sigma [{}, {}]",
                prior.theta.0, prior.theta.1, prior.sigma.0, prior.sigma.1
            )?;
            writeln!(
                out,
                "{:.0}% credible interval ({:.3}, {:.3}); mode theta = {:.4}, sigma = {:.4}",
                100.0 * summary.interval.level,
                summary.interval.lower,
                summary.interval.upper,
                summary.mode.0,
                summary.mode.1
            )?;
            writeln!(out, "acceptance rate {:.3}{}", chain.acceptance_rate, if chain.mistuned { " (proposal mistuned)" } else { "" })?;
            if let Some(path) = &args.chain_csv {
                write_chain_csv(&chain, BufWriter::new(File::create(path)?))?;
            }
            (
                json!({ "posterior": cfg, "chain_length": length, "summary_pool_size": joint.pool_size }),
                json!({
                    "interval": summary.interval,
                    "mode": summary.mode,
                    "mode_fit": summary.mode_fit,
                    "acceptance_rate": chain.acceptance_rate,
                    "mistuned": chain.mistuned,
                    "min_ess": chain.min_ess,
                    "prior_bounds": chain.prior_bounds,
                    "proposal": chain.proposal_spec,
                    "chain_csv": args.chain_csv,
                }),
            )
        }
    };
    let mut flags = serde_json::to_value(args)?;
    flags["seed"] = json!(seed);
    let record = RunRecord {
        schema: RUN_RECORD_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "analyze".into(),
        flags,
        inputs: Some(data.info()),
        seed: Some(seed),
        config,
        outputs,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(path) = &args.out {
        write_json(path, &record)?;
    }
    Ok(record)
}

pub fn cmd_study(args: &StudyArgs, out: &mut dyn Write) -> Result<RunRecord> {
    let start = Instant::now();
    let text = std::fs::read_to_string(&args.spec)?;
    let spec = StudySpec::from_json(&text)?;
    let outcome = run_study(&spec)?;
    for t in &outcome.tables {
        writeln!(out, "wrote {}", t.display())?;
    }
    writeln!(out, "wrote {}", outcome.sidecar.display())?;
    let record = RunRecord {
        schema: RUN_RECORD_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "study".into(),
        flags: serde_json::to_value(args)?,
        inputs: None,
        seed: Some(spec.seed),
        config: serde_json::to_value(&spec)?,
        outputs: json!({ "tables": outcome.tables, "sidecar": outcome.sidecar, "summary": outcome.summary }),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    let path = args.record.clone().unwrap_or_else(|| append_extension(&spec.output, ".run.json"));
    write_json(&path, &record)?;
    Ok(record)
}

/// Parses `args` and runs the command, returning the process exit code.
/// Errors print a one-line diagnostic on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(threads) = cli.threads {
        // ignore failure: the global pool may already exist
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, &mut out),
        Command::Analyze(a) => cmd_analyze(a, &mut out),
        Command::Study(a) => cmd_study(a, &mut out),
    };
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_datasets() {
        let sets = parse_datasets("0.5,0.5\n# comment\n0.2 0.3 0.5\n", "f").unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[1].point.k(), 3);
        let one = parse_datasets(r#"{"k": 2, "frequencies": [0.4, 0.6], "label": "toy"}"#, "f").unwrap();
        assert_eq!(one[0].label, "toy");
        assert!(parse_datasets(r#"{"k": 3, "frequencies": [0.4, 0.6]}"#, "f").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = fnv1a(&[0.5, 0.5]);
        assert_eq!(a, fnv1a(&[0.5, 0.5]));
        assert_ne!(a, fnv1a(&[0.5, 0.5000001]));
    }

    #[test]
    fn flag_mismatch_detected() {
        let cli = Cli::try_parse_from(["wfsel", "analyze", "--data", "lyme", "--method", "mle", "--m", "100"]).unwrap();
        let Command::Analyze(args) = cli.command else { panic!() };
        assert!(check_method_flags(&args).is_err());
    }

    #[test]
    fn pairs_parse() {
        assert_eq!(parse_pair("-100,1000").unwrap(), (-100.0, 1000.0));
        assert!(parse_pair("1").is_err());
    }
}
