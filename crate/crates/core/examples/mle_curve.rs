//! sigma_hat as a function of the observed homozygosity for k = 4 and
//! k = 20. The estimate blows up as h approaches 1/k.

use wfsel::density::{PoolConfig, Proposal, WeightedPool};
use wfsel::study::mle_curve;
use wfsel::MutationParams;

fn main() -> wfsel::Result<()> {
    for (k, grid) in [(4, vec![0.26, 0.27, 0.288, 0.3, 0.35, 0.45]), (20, vec![0.06, 0.08, 0.1, 0.13, 0.2, 0.3])] {
        let theta = MutationParams::symmetric(5.0, k)?;
        let cfg = PoolConfig::with_size(200_000).proposal(Proposal::defensive(&theta)).retain_draws(false);
        let pool = WeightedPool::build(&theta, &cfg, 4)?;
        println!("k = {k}, theta = 5");
        for row in mle_curve(k, &grid, &pool)? {
            println!("  h {:.3}  sigma_hat {:>10.2}  {:?}", row.h, row.sigma_hat, row.status);
        }
    }
    Ok(())
}
