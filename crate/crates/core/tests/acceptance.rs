//! Acceptance suite. Each criterion prints one `PASS` / `FAIL` line; the
//! test fails at the end if any criterion failed.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use wfsel::datasets;
use wfsel::density::{
    cdf_homozygosity, g_sigma, log_likelihood, log_normalizer, optimal_composition, score_general, OptimizerConfig,
    PoolConfig, Proposal, WeightedPool,
};
use wfsel::inference::{
    bootstrap, mle_joint, mle_sigma, monotone_ci, posterior_sample, posterior_summary, BootstrapConfig, JointConfig,
    MleResult, MleStatus, PosteriorConfig, PosteriorMode, PriorBounds,
};
use wfsel::sampler::{sample_selection, SamplerConfig, SamplerMethod};
use wfsel::study::instability_probability;
use wfsel::{Homozygosity, MutationParams, SelectionModel, SimplexPoint};

const SEED: u64 = 20_240_611;

struct Ledger {
    failures: Vec<String>,
}

impl Ledger {
    fn record(&mut self, id: &str, pass: bool, detail: String, started: Instant) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id}: {detail} [{:.1}s]", started.elapsed().as_secs_f64());
        if !pass {
            self.failures.push(id.to_string());
        }
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn within_rel(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn defensive_pool(theta: f64, k: usize, size: usize, seed: u64, retain: bool) -> WeightedPool {
    let params = MutationParams::symmetric(theta, k).unwrap();
    let cfg = PoolConfig::with_size(size).proposal(Proposal::defensive(&params)).retain_draws(retain);
    WeightedPool::build(&params, &cfg, seed).unwrap()
}

fn h_of(value: f64, k: usize) -> Homozygosity {
    Homozygosity::new(value, k).unwrap()
}

fn criterion_1(l: &mut Ledger) {
    let t = Instant::now();
    let lyme = datasets::lyme().homozygosity().value();
    let kir = datasets::kir().homozygosity().value();
    // independent arithmetic on the published frequencies
    let oracle = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let agree = (lyme - oracle(&datasets::LYME)).abs() < 1e-15 && (kir - oracle(&datasets::KIR)).abs() < 1e-15;
    let pass = agree && within(lyme, 0.288, 0.0005) && within(kir, 0.172, 0.0005);
    l.record("1", pass, format!("h(lyme) = {lyme:.5} vs 0.288, h(kir) = {kir:.5} vs 0.172"), t);
}

fn criterion_2(l: &mut Ledger) {
    let t = Instant::now();
    let fit = mle_joint(&datasets::lyme(), SEED, &JointConfig::default()).unwrap();
    let theta = fit.theta_hat.unwrap_or(f64::NAN);
    let pass = fit.status == MleStatus::Converged && within(theta, 4.8, 0.5) && within(fit.sigma_hat, 35.1, 4.0);
    l.record(
        "2",
        pass,
        format!("lyme joint MLE (theta, sigma) = ({theta:.3}, {:.2}) vs (4.8 +- 0.5, 35.1 +- 4)", fit.sigma_hat),
        t,
    );
}

fn criterion_3(l: &mut Ledger, kir_fit: &MleResult) {
    let t = Instant::now();
    let lyme = datasets::lyme();
    let pool = defensive_pool(4.8, 4, 1_000_000, SEED, false);
    let ci = monotone_ci(lyme.homozygosity(), &pool, 0.025, 0.025).unwrap();
    let pass = within(ci.lower, -8.0, 3.0) && within(ci.upper, 105.0, 10.0);
    l.record(
        "3 (lyme)",
        pass,
        format!("theta 4.8, 95% exact interval ({:.2}, {:.2}) vs (-8 +- 3, 105 +- 10)", ci.lower, ci.upper),
        t,
    );

    let t = Instant::now();
    let kir = datasets::kir();
    let theta = kir_fit.theta_hat.unwrap();
    let pool = defensive_pool(theta, 8, 1_000_000, SEED, false);
    let ci = monotone_ci(kir.homozygosity(), &pool, 0.025, 0.025).unwrap();
    let pass = within(ci.lower, -10.0, 3.0) && within(ci.upper, 159.0, 15.0);
    l.record(
        "3 (kir)",
        pass,
        format!("theta_hat {theta:.3}, 95% exact interval ({:.2}, {:.2}) vs (-10 +- 3, 159 +- 15)", ci.lower, ci.upper),
        t,
    );
}

fn criterion_4(l: &mut Ledger) {
    let t = Instant::now();
    let pool = defensive_pool(4.8, 4, 1_000_000, SEED, false);
    let h = h_of(0.288, 4);
    let below = cdf_homozygosity(&pool, 17.25, h).value;
    let above = 1.0 - cdf_homozygosity(&pool, 681.2, h).value;
    let pass = within(below, 0.354, 0.015) && above < 0.005;
    l.record(
        "4",
        pass,
        format!("P(H <= 0.288 | 17.25) = {below:.4} vs 0.354 +- 0.015; P(H >= 0.288 | 681.2) = {above:.2e} < 0.005"),
        t,
    );
}

fn criterion_5(l: &mut Ledger, lyme_fit: (f64, f64), kir_fit: &MleResult) {
    let cfg = BootstrapConfig::default();
    let t = Instant::now();
    let (theta, sigma) = lyme_fit;
    let b = bootstrap(theta, sigma, 4, 10_000, SEED, &cfg).unwrap();
    let ci = &b.percentile_interval;
    let se_ok = !b.standard_error_undefined && within_rel(b.standard_error, 176.4, 0.4);
    let ci_ok = within_rel(ci.lower, 17.2, 0.3) && within_rel(ci.upper, 681.3, 0.3);
    l.record(
        "5 (lyme)",
        se_ok && ci_ok,
        format!(
            "at ({theta}, {sigma}): SE {:.1} vs 176.4 +- 40%; 95% percentile ({:.2}, {:.2}) vs (17.2, 681.3) +- 30%; {} unbounded",
            b.standard_error, ci.lower, ci.upper, b.n_unbounded
        ),
        t,
    );

    let t = Instant::now();
    let theta = kir_fit.theta_hat.unwrap();
    let b = bootstrap(theta, kir_fit.sigma_hat, 8, 10_000, SEED, &cfg).unwrap();
    let ci = &b.percentile_interval;
    let pass = within_rel(ci.lower, 21.1, 0.3) && within_rel(ci.upper, 396.4, 0.3);
    l.record(
        "5 (kir)",
        pass,
        format!(
            "at ({theta:.3}, {:.2}): 95% percentile ({:.2}, {:.2}) vs (21.1, 396.4) +- 30%; {} unbounded",
            kir_fit.sigma_hat, ci.lower, ci.upper, b.n_unbounded
        ),
        t,
    );
}

fn criterion_6(l: &mut Ledger) {
    let prior = PriorBounds::default();
    let summary_cfg = JointConfig { pool_size: 200_000, ..JointConfig::default() };
    let run = |x: &SimplexPoint, mode: PosteriorMode| {
        let cfg = PosteriorConfig { mode, ..PosteriorConfig::default() };
        let chain = posterior_sample(x, &prior, 100_000, SEED, &cfg).unwrap();
        let s = posterior_summary(&chain, 0.95, x, SEED, &summary_cfg).unwrap();
        (chain, s)
    };
    let check = |lo: f64, hi: f64, target: (f64, f64)| within_rel(lo, target.0, 0.25) && within_rel(hi, target.1, 0.25);

    let t = Instant::now();
    let (chain, s) = run(&datasets::lyme(), PosteriorMode::Joint);
    l.record(
        "6 (lyme joint)",
        check(s.interval.lower, s.interval.upper, (10.8, 124.9)),
        format!(
            "95% credible ({:.2}, {:.2}) vs (10.8, 124.9) +- 25%; acceptance {:.3}",
            s.interval.lower, s.interval.upper, chain.acceptance_rate
        ),
        t,
    );

    let t = Instant::now();
    let kir = datasets::kir();
    let (chain, joint) = run(&kir, PosteriorMode::Joint);
    l.record(
        "6 (kir joint)",
        check(joint.interval.lower, joint.interval.upper, (4.3, 205.5)),
        format!(
            "95% credible ({:.2}, {:.2}) vs (4.3, 205.5) +- 25%; acceptance {:.3}",
            joint.interval.lower, joint.interval.upper, chain.acceptance_rate
        ),
        t,
    );

    let t = Instant::now();
    let theta = joint.mode.0;
    let (chain, s) = run(&kir, PosteriorMode::FixedTheta { theta });
    l.record(
        "6 (kir fixed theta)",
        check(s.interval.lower, s.interval.upper, (6.3, 182.9)),
        format!(
            "theta {theta:.3} (posterior mode): 95% credible ({:.2}, {:.2}) vs (6.3, 182.9) +- 25%; acceptance {:.3}",
            s.interval.lower, s.interval.upper, chain.acceptance_rate
        ),
        t,
    );
}

fn criterion_7(l: &mut Ledger) {
    let t = Instant::now();
    let pool = defensive_pool(5.0, 20, 1_000_000, SEED, false);
    let near = mle_sigma(h_of(0.13, 20), &pool);
    let close = mle_sigma(h_of(0.08, 20), &pool);
    let pass = near.status == MleStatus::Converged
        && (300.0..=400.0).contains(&near.sigma_hat)
        && (close.status == MleStatus::UnboundedAbove || close.sigma_hat > 900.0);
    l.record(
        "7",
        pass,
        format!(
            "k 20, theta 5: sigma_hat(0.13) = {:.1} in [300, 400]; sigma_hat(0.08) = {:.1} ({:?}, ESS {:.0}) > 900",
            near.sigma_hat, close.sigma_hat, close.status, close.ess_at_solution
        ),
        t,
    );
}

fn criterion_8(l: &mut Ledger) {
    let t = Instant::now();
    let grid: Vec<f64> = (0..=10).map(|i| 10.0 * i as f64).collect();
    let n = 1000;
    let rows = instability_probability(10, 5.0, &grid, 0.09, n, SEED).unwrap();
    let mut bad = Vec::new();
    for r in &rows {
        let (p1, p2) = (r.hetero_hit_fraction, r.homo_hit_fraction);
        let se = ((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / n as f64).sqrt();
        if !(p1 - p2 > 3.0 * se) {
            bad.push(format!("sigma {}: {p1:.3} vs {p2:.3}", r.sigma));
        }
    }
    let detail = if bad.is_empty() {
        format!("hetero beats homo by > 3 se at all {} sigma values", rows.len())
    } else {
        format!("ordering not separated at {}", bad.join("; "))
    };
    l.record("8", bad.is_empty(), detail, t);
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

fn criterion_9(l: &mut Ledger) {
    // monotonicity on fixed pools
    let t = Instant::now();
    let pool = defensive_pool(4.8, 4, 200_000, SEED, false);
    let h = h_of(0.288, 4);
    let grid: Vec<f64> = (0..50).map(|i| -100.0 + 1100.0 * i as f64 / 49.0).collect();
    let g: Vec<f64> = grid.iter().map(|&s| g_sigma(&pool, s).value).collect();
    let c: Vec<f64> = grid.iter().map(|&s| cdf_homozygosity(&pool, s, h).value).collect();
    let pass = g.windows(2).all(|w| w[1] <= w[0]) && c.windows(2).all(|w| w[1] >= w[0]);
    l.record("9a", pass, "g decreasing and cdf increasing over 50 sigma values on [-100, 1000]".into(), t);

    // d/dsigma log normalizer against -g
    let t = Instant::now();
    let mut worst = 0.0f64;
    for sigma in [-20.0, 0.0, 17.25, 35.1, 200.0] {
        let step = 1e-4;
        let up = log_normalizer(&pool, &SelectionModel::symmetric(sigma + step)).unwrap().value;
        let down = log_normalizer(&pool, &SelectionModel::symmetric(sigma - step)).unwrap().value;
        let fd = (up - down) / (2.0 * step);
        let g = g_sigma(&pool, sigma).value;
        worst = worst.max(((fd + g) / g).abs());
    }
    l.record("9b", worst <= 1e-6, format!("worst relative gap {worst:.2e} <= 1e-6"), t);

    // general score against finite differences of the log-likelihood
    let t = Instant::now();
    let rows = vec![vec![12.0, -3.5, 4.25], vec![-3.5, 7.0, 1.5], vec![4.25, 1.5, -2.0]];
    let x = SimplexPoint::new(vec![0.5, 0.3, 0.2]).unwrap();
    let theta = MutationParams::symmetric(3.0, 3).unwrap();
    let pool3 = defensive_pool(3.0, 3, 100_000, SEED, true);
    let model = SelectionModel::general(rows.clone()).unwrap();
    let (score, _) = score_general(&x, &pool3, &model).unwrap();
    let ll = |r: Vec<Vec<f64>>| log_likelihood(&x, &theta, &SelectionModel::general(r).unwrap(), &pool3).unwrap().value;
    let mut worst = 0.0f64;
    let step = 1e-5;
    for i in 0..3 {
        for j in i..3 {
            let bump = |d: f64| {
                let mut r = rows.clone();
                r[i][j] += d;
                if i != j {
                    r[j][i] += d;
                }
                r
            };
            let fd = (ll(bump(step)) - ll(bump(-step))) / (2.0 * step);
            // a symmetric bump moves both off-diagonal entries
            let analytic = if i == j { score[i][j] } else { 2.0 * score[i][j] };
            worst = worst.max((fd - analytic).abs() / analytic.abs().max(1e-3));
        }
    }
    l.record("9c", worst <= 1e-5, format!("worst relative gap {worst:.2e} over the 6 entries of a 3x3 matrix"), t);

    // rejection vs MH
    let t = Instant::now();
    let params = MutationParams::symmetric(4.8, 4).unwrap();
    let n = 5000;
    let (rej, rr) = sample_selection(&params, 20.0, n, SEED, &SamplerConfig::default()).unwrap();
    let mh_cfg = SamplerConfig { sigma_switch: 10.0, ..SamplerConfig::default() };
    let (mh, mr) = sample_selection(&params, 20.0, n, SEED + 1, &mh_cfg).unwrap();
    let hs = |v: &[SimplexPoint]| v.iter().map(|x| x.homozygosity().value()).collect::<Vec<_>>();
    let d = ks_statistic(hs(&rej), hs(&mh));
    // asymptotic critical value at level 0.001
    let critical = (-(0.0005f64).ln() / 2.0).sqrt() * (2.0 / n as f64).sqrt();
    let pass = rr.method == SamplerMethod::Rejection && mr.method == SamplerMethod::IndependenceMh && d < critical;
    l.record("9d", pass, format!("KS distance on H {d:.4} < {critical:.4} (level 0.001)"), t);

    // concentration at the centroid
    let t = Instant::now();
    let means: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let (draws, _) = sample_selection(&params, s, 4000, SEED + 10 + i as u64, &SamplerConfig::default()).unwrap();
            draws.iter().map(|x| x.homozygosity().value() - 0.25).sum::<f64>() / draws.len() as f64
        })
        .collect();
    let pass = means[0] > means[1] && means[1] > means[2];
    l.record("9e", pass, format!("mean |H - 1/k| at sigma 10, 100, 1000: {means:.5?}"), t);

    // optimal composition
    let t = Instant::now();
    let cfg = OptimizerConfig::default();
    let centre = optimal_composition(&SelectionModel::symmetric(3.0), 5, &cfg).unwrap();
    let centre_gap = centre.point.iter().map(|v| (v - 0.2).abs()).fold(0.0, f64::max);
    let corner = optimal_composition(&SelectionModel::symmetric(-3.0), 5, &cfg).unwrap();
    let is_vertex = corner.point.iter().filter(|v| (*v - 1.0).abs() < 1e-9).count() == 1
        && corner.point.iter().filter(|v| v.abs() < 1e-9).count() == 4;
    l.record(
        "9f",
        centre_gap <= 1e-6 && is_vertex,
        format!("centroid gap {centre_gap:.1e}; -sigma I minimizer {:?}", corner.point),
        t,
    );

    // coverage of exact 90% intervals
    let t = Instant::now();
    let params = MutationParams::symmetric(5.0, 4).unwrap();
    let (data, _) = sample_selection(&params, 30.0, 500, SEED + 20, &SamplerConfig::default()).unwrap();
    let pool = defensive_pool(5.0, 4, 100_000, SEED + 21, false);
    let covered = data
        .iter()
        .filter(|x| monotone_ci(x.homozygosity(), &pool, 0.05, 0.05).unwrap().contains(30.0))
        .count();
    let rate = covered as f64 / data.len() as f64;
    l.record("9g", (0.855..=0.945).contains(&rate), format!("coverage {rate:.3} in [0.855, 0.945] over 500 data sets"), t);
}

#[test]
fn acceptance() {
    let mut l = Ledger { failures: Vec::new() };
    criterion_1(&mut l);
    criterion_2(&mut l);
    // KIR has no published joint MLE; criteria 3 and 5 condition on ours
    let kir_fit = mle_joint(&datasets::kir(), SEED, &JointConfig::default()).unwrap();
    println!(
        "info: kir joint MLE (theta, sigma) = ({:.3}, {:.2}), {:?}",
        kir_fit.theta_hat.unwrap_or(f64::NAN),
        kir_fit.sigma_hat,
        kir_fit.status
    );
    criterion_3(&mut l, &kir_fit);
    criterion_4(&mut l);
    criterion_5(&mut l, (4.8, 35.1), &kir_fit);
    criterion_6(&mut l);
    criterion_7(&mut l);
    criterion_8(&mut l);
    criterion_9(&mut l);
    assert!(l.failures.is_empty(), "failed criteria: {}", l.failures.join(", "));
}
