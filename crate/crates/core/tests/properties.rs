//! Randomized invariants of the pool estimators, the solvers and the
//! simplex helpers.

use std::sync::OnceLock;

use proptest::prelude::*;
use wfsel::density::{cdf_homozygosity, g_sigma, project_to_simplex, PoolConfig, Proposal, WeightedPool};
use wfsel::inference::{mle_sigma, monotone_ci, quantile_sorted, MleStatus};
use wfsel::sampler::sample_neutral;
use wfsel::{parse_frequencies, Homozygosity, MutationParams, SimplexPoint};

fn pool() -> &'static WeightedPool {
    static POOL: OnceLock<WeightedPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let params = MutationParams::symmetric(4.8, 4).unwrap();
        let cfg = PoolConfig::with_size(20_000).proposal(Proposal::defensive(&params)).retain_draws(false);
        WeightedPool::build(&params, &cfg, 11).unwrap()
    })
}

fn simplex(k: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mean_homozygosity_decreases(a in -200.0f64..2000.0, b in -200.0f64..2000.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(g_sigma(pool(), hi).value <= g_sigma(pool(), lo).value);
    }

    #[test]
    fn cdf_increases(a in -200.0f64..2000.0, b in -200.0f64..2000.0, h in 0.251f64..0.99) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let h = Homozygosity::new(h, 4).unwrap();
        prop_assert!(cdf_homozygosity(pool(), hi, h).value >= cdf_homozygosity(pool(), lo, h).value);
    }

    #[test]
    fn converged_mle_solves_score(x in simplex(4..5)) {
        let x = SimplexPoint::new(x).unwrap();
        let fit = mle_sigma(x.homozygosity(), pool());
        if fit.status == MleStatus::Converged {
            prop_assert!(fit.score_at_solution.abs() < 1e-6);
            let g = g_sigma(pool(), fit.sigma_hat).value;
            prop_assert!((g - x.homozygosity().value()).abs() < 1e-6);
        }
    }

    #[test]
    fn exact_interval_is_ordered(h in 0.26f64..0.9, a1 in 0.005f64..0.2, a2 in 0.005f64..0.2) {
        let ci = monotone_ci(Homozygosity::new(h, 4).unwrap(), pool(), a1, a2).unwrap();
        prop_assert!(ci.lower <= ci.upper);
        prop_assert!((ci.level - (1.0 - a1 - a2)).abs() < 1e-12);
    }

    #[test]
    fn homozygosity_bounds(x in simplex(2..12)) {
        let k = x.len() as f64;
        let h = SimplexPoint::new(x).unwrap().homozygosity().value();
        prop_assert!(h >= 1.0 / k - 1e-12 && h <= 1.0 + 1e-12);
    }

    #[test]
    fn projection_lands_on_simplex(v in prop::collection::vec(-5.0f64..5.0, 2..10)) {
        let p = project_to_simplex(&v);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let again = project_to_simplex(&p);
        for (a, b) in p.iter().zip(&again) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn frequencies_round_trip(x in simplex(2..10)) {
        let text = x.iter().map(|v| format!("{v:.17}")).collect::<Vec<_>>().join(", ");
        let parsed = parse_frequencies(&text).unwrap();
        for (a, b) in parsed.values().iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quantiles_are_monotone(mut v in prop::collection::vec(-1e3f64..1e3, 1..50), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        v.sort_by(f64::total_cmp);
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let (a, b) = (quantile_sorted(&v, lo), quantile_sorted(&v, hi));
        prop_assert!(a <= b);
        prop_assert!(a >= v[0] && b <= *v.last().unwrap());
    }

    #[test]
    fn neutral_draws_are_reproducible(theta in 0.2f64..20.0, k in 2usize..8, seed in any::<u64>()) {
        let params = MutationParams::symmetric(theta, k).unwrap();
        let a = sample_neutral(&params, 20, seed).unwrap();
        let b = sample_neutral(&params, 20, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iter().all(|x| x.values().iter().all(|&v| v > 0.0)));
    }
}
