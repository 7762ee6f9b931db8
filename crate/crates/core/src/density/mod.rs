//! Neutral and selected stationary densities, the pool-based normalizer,
//! score functions, and the singular composition of the selected likelihood.

mod estimates;
mod optimum;
mod pool;

pub use estimates::{
    cdf_homozygosity, g_sigma, log_normalizer, log_normalizer_std_error, quantile_homozygosity,
    score_general, score_sigma, var_homozygosity, EssReport, Estimate,
};
pub(crate) use estimates::{mean_homozygosity, reweigh_symmetric_masses};
pub use optimum::{optimal_composition, project_to_simplex, OptimalComposition, OptimizerConfig};
pub use pool::{build_pool, PoolConfig, Proposal, WeightedPool, DEFAULT_ESS_FLOOR, DEFENSIVE_THRESHOLD};

use crate::error::{Error, Result};
use crate::model::{quadratic_form, MutationParams, SelectionModel, SimplexPoint};
use crate::stream::dirichlet_log_density;

/// Log of the neutral Dirichlet density at `x`.
pub fn neutral_log_density(x: &SimplexPoint, theta: &MutationParams) -> Result<f64> {
    if x.k() != theta.k() {
        return Err(Error::DimensionMismatch {
            expected: theta.k(),
            found: x.k(),
        });
    }
    let log_x: Vec<f64> = x.values().iter().map(|v| v.ln()).collect();
    Ok(dirichlet_log_density(&theta.per_allele(), &log_x))
}

/// Log stationary density of `x` under selection:
/// `-x' S x - log E_Neut(exp(-X' S X)) + log f_Neut(x | theta)`.
///
/// If the pool targets a different `theta`, it is reweighted first (same
/// draws, new base weights).
pub fn log_likelihood(
    x: &SimplexPoint,
    theta: &MutationParams,
    model: &SelectionModel,
    pool: &WeightedPool,
) -> Result<Estimate> {
    if pool.k() != x.k() {
        return Err(Error::DimensionMismatch {
            expected: pool.k(),
            found: x.k(),
        });
    }
    let retargeted;
    let pool = if pool.theta() == theta {
        pool
    } else {
        retargeted = pool.retarget(theta)?;
        &retargeted
    };
    let normalizer = log_normalizer(pool, model)?;
    Ok(Estimate {
        value: -quadratic_form(x, model)? - normalizer.value + neutral_log_density(x, theta)?,
        ess: normalizer.ess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_dirichlet_density() {
        let theta = MutationParams::general(vec![1.0, 1.0]).unwrap();
        let x = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        assert_relative_eq!(neutral_log_density(&x, &theta).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn flat_k3_density_is_log_two() {
        // Gamma(3) / Gamma(1)^3 = 2
        let theta = MutationParams::symmetric(3.0, 3).unwrap();
        let x = SimplexPoint::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert_relative_eq!(neutral_log_density(&x, &theta).unwrap(), 2f64.ln(), epsilon = 1e-13);
    }

    #[test]
    fn beta22_density_at_half() {
        // 6 x (1 - x) at x = 1/2
        let theta = MutationParams::general(vec![2.0, 2.0]).unwrap();
        let x = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(neutral_log_density(&x, &theta).unwrap(), 1.5f64.ln(), epsilon = 1e-13);
    }

    #[test]
    fn zero_selection_likelihood_is_neutral() {
        let theta = MutationParams::symmetric(4.8, 4).unwrap();
        let pool = build_pool(&theta, 1.2, 1000, 1).unwrap();
        let x = crate::model::datasets::lyme();
        let ll = log_likelihood(&x, &theta, &SelectionModel::symmetric(0.0), &pool).unwrap();
        assert_eq!(ll.value, neutral_log_density(&x, &theta).unwrap());
    }

    #[test]
    fn likelihood_retargets_pool() {
        let theta = MutationParams::symmetric(4.8, 4).unwrap();
        let other = MutationParams::symmetric(6.0, 4).unwrap();
        let cfg = PoolConfig::with_size(20_000).proposal(Proposal::defensive(&theta));
        let pool = WeightedPool::build(&theta, &cfg, 2).unwrap();
        let x = crate::model::datasets::lyme();
        let m = SelectionModel::symmetric(20.0);
        let via_retarget = log_likelihood(&x, &other, &m, &pool).unwrap().value;
        let direct = log_likelihood(&x, &other, &m, &pool.retarget(&other).unwrap()).unwrap().value;
        assert_eq!(via_retarget, direct);
    }

    #[test]
    fn dimension_mismatch() {
        let theta = MutationParams::symmetric(3.0, 3).unwrap();
        let x = SimplexPoint::uniform(4).unwrap();
        assert!(neutral_log_density(&x, &theta).is_err());
    }
}
