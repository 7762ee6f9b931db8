//! Exact 95% intervals for sigma from the monotone homozygosity CDF, at
//! fixed theta, for the two bundled data sets.

use wfsel::datasets;
use wfsel::density::{PoolConfig, Proposal, WeightedPool};
use wfsel::inference::monotone_ci;
use wfsel::MutationParams;

fn main() -> wfsel::Result<()> {
    let pool_size = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    for (name, theta) in [("lyme", 4.8), ("kir", 6.19)] {
        let x = datasets::by_name(name).expect("bundled");
        let params = MutationParams::symmetric(theta, x.k())?;
        let cfg = PoolConfig::with_size(pool_size).proposal(Proposal::defensive(&params));
        let pool = WeightedPool::build(&params, &cfg, 42)?;
        let ci = monotone_ci(x.homozygosity(), &pool, 0.025, 0.025)?;
        println!(
            "{name:>5} theta = {theta}: h = {:.4}, 95% interval ({:.1}, {:.1})",
            x.homozygosity().value(),
            ci.lower,
            ci.upper
        );
        for note in &ci.advisories {
            println!("      note: {note}");
        }
    }
    Ok(())
}
