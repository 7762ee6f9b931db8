//! Joint maximum-likelihood fits of (theta, sigma) to the bundled data sets.
//!
//! Pass a pool size as the first argument to trade accuracy for speed.

use std::time::Instant;

use wfsel::datasets;
use wfsel::inference::{mle_joint, JointConfig};

fn main() -> wfsel::Result<()> {
    let pool_size = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let config = JointConfig { pool_size, ..JointConfig::default() };
    for name in datasets::NAMES {
        let x = datasets::by_name(name).expect("bundled");
        let start = Instant::now();
        let fit = mle_joint(&x, 2010, &config)?;
        println!(
            "{name:>5} h = {:.4}: theta_hat = {:.3}, sigma_hat = {:.2} ({:?}), log-likelihood {:.4}, {:.1?}",
            x.homozygosity().value(),
            fit.theta_hat.unwrap_or(f64::NAN),
            fit.sigma_hat,
            fit.status,
            fit.log_likelihood.unwrap_or(f64::NAN),
            start.elapsed()
        );
    }
    Ok(())
}
