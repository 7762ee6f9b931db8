//! Distribution of H at the two ends of the Lyme exact interval, with the
//! observed h = 0.288 marked by its CDF value.

use wfsel::density::{PoolConfig, Proposal, WeightedPool};
use wfsel::study::cdf_panel;
use wfsel::{datasets, MutationParams};

fn main() -> wfsel::Result<()> {
    let theta = MutationParams::symmetric(4.8, 4)?;
    let cfg = PoolConfig::with_size(500_000).proposal(Proposal::defensive(&theta)).retain_draws(false);
    let pool = WeightedPool::build(&theta, &cfg, 8)?;
    let h = datasets::lyme().homozygosity();
    let (rows, hist) = cdf_panel(h, &pool, &[-8.0, 17.25, 105.0, 681.2], 20);
    for r in &rows {
        println!(
            "sigma {:>7}: P(H <= h) {:.4}, central 95% of H ({:.3}, {:.3}), ESS {:.0}",
            r.sigma, r.cdf_at_h, r.q025, r.q975, r.ess
        );
    }
    for r in hist.iter().filter(|r| r.series == 105.0 && r.mass > 0.01) {
        println!("  [{:.3}, {:.3}) {}", r.bin_lo, r.bin_hi, "#".repeat((r.mass * 200.0) as usize));
    }
    Ok(())
}
