//! Log-likelihood surface, its sigma-score, a general selection matrix and
//! the composition that minimizes the selection penalty.

use wfsel::density::{
    g_sigma, log_likelihood, optimal_composition, score_general, score_sigma, OptimizerConfig, PoolConfig, Proposal,
    WeightedPool,
};
use wfsel::{datasets, MutationParams, SelectionModel};

fn main() -> wfsel::Result<()> {
    let x = datasets::lyme();
    let theta = MutationParams::symmetric(4.8, 4)?;
    let cfg = PoolConfig::with_size(200_000).proposal(Proposal::defensive(&theta));
    let pool = WeightedPool::build(&theta, &cfg, 2)?;
    for sigma in [0.0, 10.0, 35.1, 100.0] {
        let ll = log_likelihood(&x, &theta, &SelectionModel::symmetric(sigma), &pool)?;
        let score = score_sigma(x.homozygosity(), &pool, sigma);
        println!(
            "sigma {sigma:>6}: log L {:>8.4}, score {:>+.5}, E(H) {:.4}, ESS {:.0}",
            ll.value,
            score.value,
            g_sigma(&pool, sigma).value,
            ll.ess.ess
        );
    }

    let model = SelectionModel::general(vec![
        vec![30.0, 0.0, 5.0, 0.0],
        vec![0.0, 40.0, 0.0, 0.0],
        vec![5.0, 0.0, 30.0, 0.0],
        vec![0.0, 0.0, 0.0, 20.0],
    ])?;
    let (grad, _) = score_general(&x, &pool, &model)?;
    println!("general score (row 0): {:.5?}", grad[0]);
    let best = optimal_composition(&model, 4, &OptimizerConfig::default())?;
    println!("penalty minimized at {:.4?} (value {:.4})", best.point, best.value);
    let worst = optimal_composition(&SelectionModel::symmetric(-10.0), 4, &OptimizerConfig::default())?;
    println!("homozygote advantage: minimizer {:?}, boundary {}", worst.point, worst.boundary);
    Ok(())
}
