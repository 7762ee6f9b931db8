use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SelectionMatrix, SelectionModel, SimplexPoint};
use crate::stream::{rng_for, LogDirichlet, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Stop when the unit-step gradient mapping is shorter than this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Random interior starts on top of the centroid and the k vertices.
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
            random_starts: 10,
            seed: 0,
        }
    }
}

/// Minimizer of `x' S x` over the closed simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalComposition {
    /// May contain exact zeros; see `boundary`.
    pub point: Vec<f64>,
    pub value: f64,
    /// The minimizer has zero entries, so it lies outside the support of
    /// the stationary density. It is still the limit point where the
    /// selection signal is strongest.
    pub boundary: bool,
    pub runs: usize,
    pub converged_runs: usize,
}

impl OptimalComposition {
    /// The minimizer as an interior point, when it is one.
    pub fn interior_point(&self) -> Option<SimplexPoint> {
        if self.boundary {
            None
        } else {
            SimplexPoint::new(self.point.clone()).ok()
        }
    }
}

/// Euclidean projection onto `{x >= 0, sum x = 1}`.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.iter().map(|&vi| (vi - tau).max(0.0)).collect()
}

struct Run {
    point: Vec<f64>,
    value: f64,
    converged: bool,
}

fn gradient_mapping_norm(m: &SelectionMatrix, x: &[f64]) -> f64 {
    let g = m.gradient(x);
    let step: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b).collect();
    let p = project_to_simplex(&step);
    x.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

fn descend(m: &SelectionMatrix, start: Vec<f64>, config: &OptimizerConfig) -> Run {
    let mut x = start;
    let mut fx = m.bilinear(&x);
    let mut step = 1.0;
    for _ in 0..config.max_iterations {
        if gradient_mapping_norm(m, &x) < config.tolerance {
            return Run {
                point: x,
                value: fx,
                converged: true,
            };
        }
        let g = m.gradient(&x);
        // backtracking with the proximal sufficient-decrease test
        loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let y = project_to_simplex(&trial);
            let fy = m.bilinear(&y);
            let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let lin: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let quad: f64 = d.iter().map(|v| v * v).sum::<f64>() / (2.0 * step);
            if fy <= fx + lin + quad + 1e-15 * fx.abs().max(1.0) || step < 1e-20 {
                x = y;
                fx = fy;
                break;
            }
            step *= 0.5;
        }
        step = (step * 2.0).min(1.0);
    }
    let converged = gradient_mapping_norm(m, &x) < config.tolerance;
    Run {
        point: x,
        value: fx,
        converged,
    }
}

/// Finds the composition minimizing `x' S x` on the closed simplex: the data
/// point carrying the strongest possible selection signal, where the
/// likelihood in `S` is unbounded.
///
/// The quadratic form need not be convex, so projected gradient descent is
/// started from the centroid, every vertex and several random interior
/// points, and the best converged run wins.
pub fn optimal_composition(model: &SelectionModel, k: usize, config: &OptimizerConfig) -> Result<OptimalComposition> {
    if k < 2 {
        return Err(Error::TooFewAlleles(k));
    }
    let m = model.to_matrix(k)?;
    let mut starts = vec![vec![1.0 / k as f64; k]];
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        starts.push(v);
    }
    let dirichlet = LogDirichlet::symmetric(1.0, k)?;
    let mut buf = vec![0.0; k];
    for r in 0..config.random_starts {
        let mut rng = rng_for(config.seed, Stream::Optimizer, r as u64);
        dirichlet.sample_log(&mut rng, &mut buf);
        starts.push(buf.iter().map(|v| v.exp()).collect());
    }
    let runs: Vec<Run> = starts.into_iter().map(|s| descend(&m, s, config)).collect();
    let converged_runs = runs.iter().filter(|r| r.converged).count();
    let best = runs
        .iter()
        .filter(|r| r.converged || converged_runs == 0)
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start");
    Ok(OptimalComposition {
        boundary: best.point.iter().any(|&v| v <= 1e-12),
        point: best.point.clone(),
        value: best.value,
        runs: runs.len(),
        converged_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_basics() {
        assert_eq!(project_to_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        let p = project_to_simplex(&[2.0, 0.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_to_simplex(&[0.5, 0.5, 0.5]);
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn overdominance_optimum_is_centroid() {
        for k in [2, 4, 10] {
            let o = optimal_composition(&SelectionModel::symmetric(35.1), k, &OptimizerConfig::default()).unwrap();
            assert!(!o.boundary);
            for v in &o.point {
                assert!((v - 1.0 / k as f64).abs() < 1e-6);
            }
            assert!((o.value - 35.1 / k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn homozygote_advantage_optimum_is_vertex() {
        let o = optimal_composition(&SelectionModel::symmetric(-5.0), 6, &OptimizerConfig::default()).unwrap();
        assert!(o.boundary);
        assert!((o.value + 5.0).abs() < 1e-12);
        assert_eq!(o.point.iter().filter(|&&v| v == 1.0).count(), 1);
        assert!(o.interior_point().is_none());
    }

    #[test]
    fn off_diagonal_two_allele_case() {
        // x' S x = 2 x (1 - x) for S = [[0,1],[1,0]]; minimum 0 at a vertex
        let m = SelectionModel::general(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let o = optimal_composition(&m, 2, &OptimizerConfig::default()).unwrap();
        assert!(o.boundary);
        assert!(o.value.abs() < 1e-15);
        // exhaustive grid at 1e-4 agrees
        let grid_min = (0..=10_000)
            .map(|i| {
                let x = i as f64 / 1e4;
                2.0 * x * (1.0 - x)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((o.value - grid_min).abs() < 1e-12);
    }

    #[test]
    fn dimension_checked() {
        let m = SelectionModel::general(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(optimal_composition(&m, 3, &OptimizerConfig::default()).is_err());
    }
}
