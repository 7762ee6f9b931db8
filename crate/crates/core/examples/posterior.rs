//! Posterior sampling for sigma under independent uniform priors: the KIR
//! data with theta fixed, then jointly over (theta, sigma) for both data
//! sets.

use wfsel::datasets;
use wfsel::inference::{
    posterior_sample, posterior_summary, JointConfig, PosteriorConfig, PosteriorMode, PriorBounds,
};

fn main() -> wfsel::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let length = args.next().flatten().unwrap_or(100_000);
    let pool_size = args.next().flatten().unwrap_or(PosteriorConfig::default().pool_size);
    let prior = PriorBounds::default();
    let summary_cfg = JointConfig { pool_size: 200_000, ..JointConfig::default() };
    let runs = [
        ("kir", PosteriorMode::FixedTheta { theta: 6.19 }),
        ("kir", PosteriorMode::Joint),
        ("lyme", PosteriorMode::Joint),
    ];
    for (name, mode) in runs {
        let x = datasets::by_name(name).expect("bundled");
        let config = PosteriorConfig { mode, pool_size, ..PosteriorConfig::default() };
        let chain = posterior_sample(&x, &prior, length, 3, &config)?;
        let summary = posterior_summary(&chain, 0.95, &x, 3, &summary_cfg)?;
        println!(
            "{name:>5} {:?}: 95% credible ({:.1}, {:.1}), mode ({:.2}, {:.1}), acceptance {:.3}, min ESS {:.0}",
            mode,
            summary.interval.lower,
            summary.interval.upper,
            summary.mode.0,
            summary.mode.1,
            chain.acceptance_rate,
            chain.min_ess
        );
    }
    Ok(())
}
