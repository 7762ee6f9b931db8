//! Parametric bootstrap of the selection MLE at the Lyme and KIR fits. The
//! sampling distribution is heavy-tailed, and some replicates land on an
//! unbounded likelihood.

use wfsel::inference::{bootstrap, BootstrapConfig};

fn main() -> wfsel::Result<()> {
    let m = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    for (label, theta, sigma, k) in [("lyme", 4.8, 35.1, 4), ("kir", 6.19, 53.8, 8)] {
        let result = bootstrap(theta, sigma, k, m, 7, &BootstrapConfig::default())?;
        let mut hats = result.sigma_hats();
        hats.sort_by(f64::total_cmp);
        let ci = &result.percentile_interval;
        println!(
            "{label:>5} ({theta}, {sigma}, {k}): SE {:.1}{}, 95% ({:.1}, {:.1}), median {:.1}, unbounded {}/{m}, sampler {:?} at {:.3}",
            result.standard_error,
            if result.standard_error_undefined { " (undefined)" } else { "" },
            ci.lower,
            ci.upper,
            wfsel::inference::quantile_sorted(&hats, 0.5),
            result.n_unbounded,
            result.sampler.method,
            result.sampler.acceptance_rate,
        );
    }
    Ok(())
}
