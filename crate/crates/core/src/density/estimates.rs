//! Self-normalized importance estimates over a [`WeightedPool`].
//!
//! Every query reweights the pool by `exp(b_i - q_i)` where `q_i` is the
//! selection exponent of draw `i`. Weights are formed in log space and
//! shifted by their maximum before exponentiation.

use serde::{Deserialize, Serialize};

use super::pool::WeightedPool;
use crate::error::{Error, Result};
use crate::model::{Homozygosity, SelectionModel};

/// Reliability of one reweighted estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssReport {
    /// `(sum w)^2 / sum w^2`
    pub ess: f64,
    pub n: usize,
    pub min_weight_fraction: f64,
    pub max_weight_fraction: f64,
    pub floor: f64,
}

impl EssReport {
    pub fn is_reliable(&self) -> bool {
        self.ess >= self.floor
    }
}

/// A pool estimate with its weight diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub ess: EssReport,
}

impl Estimate {
    pub fn is_reliable(&self) -> bool {
        self.ess.is_reliable()
    }
}

/// Accumulated weights `w_i = exp(b_i - sigma h_i - shift)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reweighting {
    pub shift: f64,
    pub sum_w: f64,
    pub sum_w2: f64,
    pub sum_wv: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Reweighting {
    pub fn mean(&self) -> f64 {
        self.sum_wv / self.sum_w
    }

    pub fn log_mass(&self) -> f64 {
        self.shift + self.sum_w.ln()
    }

    pub fn report(&self, pool: &WeightedPool) -> EssReport {
        EssReport {
            ess: self.sum_w * self.sum_w / self.sum_w2,
            n: pool.len(),
            min_weight_fraction: self.w_min / self.sum_w,
            max_weight_fraction: self.w_max / self.sum_w,
            floor: pool.ess_floor(),
        }
    }
}

/// Reweights with log-weights `log_w(i)` and accumulates `value(i)`.
pub(crate) fn reweigh_with<L, V>(n: usize, log_w: L, value: V) -> Reweighting
where
    L: Fn(usize) -> f64,
    V: Fn(usize) -> f64,
{
    let mut shift = f64::NEG_INFINITY;
    for i in 0..n {
        shift = shift.max(log_w(i));
    }
    let mut r = Reweighting {
        shift,
        sum_w: 0.0,
        sum_w2: 0.0,
        sum_wv: 0.0,
        w_min: f64::INFINITY,
        w_max: 0.0,
    };
    for i in 0..n {
        let w = (log_w(i) - shift).exp();
        r.sum_w += w;
        r.sum_w2 += w * w;
        r.sum_wv += w * value(i);
        r.w_min = r.w_min.min(w);
        r.w_max = r.w_max.max(w);
    }
    r
}

/// Symmetric-model reweighting at intensity `sigma`.
pub(crate) fn reweigh_symmetric<V: Fn(usize) -> f64>(pool: &WeightedPool, sigma: f64, value: V) -> Reweighting {
    let h = pool.homozygosities();
    let b = pool.base_log_weights();
    reweigh_with(pool.len(), |i| b[i] - sigma * h[i], value)
}

/// Selection exponents `x_i' S x_i` for every draw.
fn exponents(pool: &WeightedPool, model: &SelectionModel) -> Result<Vec<f64>> {
    model.check_dimension(pool.k())?;
    match model {
        SelectionModel::Symmetric { sigma } => Ok(pool.homozygosities().iter().map(|h| sigma * h).collect()),
        SelectionModel::General { matrix } => {
            let draws = pool.draws_flat().ok_or(Error::DrawsNotRetained)?;
            Ok(draws.chunks(pool.k()).map(|x| matrix.bilinear(x)).collect())
        }
    }
}

/// `log E_Neut(exp(-x' S x))`, the log normalizing constant of the selected
/// density.
pub fn log_normalizer(pool: &WeightedPool, model: &SelectionModel) -> Result<Estimate> {
    let b = pool.base_log_weights();
    let r = match model {
        SelectionModel::Symmetric { sigma } => reweigh_symmetric(pool, *sigma, |_| 0.0),
        SelectionModel::General { .. } => {
            let q = exponents(pool, model)?;
            reweigh_with(pool.len(), |i| b[i] - q[i], |_| 0.0)
        }
    };
    Ok(Estimate {
        value: r.log_mass() - pool.log_base_mass(),
        ess: r.report(pool),
    })
}

/// Delta-method standard error of [`log_normalizer`]'s estimate.
pub fn log_normalizer_std_error(pool: &WeightedPool, model: &SelectionModel) -> Result<f64> {
    // ratio estimator Z = sum(u_i e_i) / sum(u_i) with u_i = exp(b_i) and
    // e_i = exp(-q_i); the delta method on log Z gives
    // var = sum u_i^2 (e_i - Z)^2 / (Z sum u_i)^2
    let q = exponents(pool, model)?;
    let b = pool.base_log_weights();
    let n = pool.len();
    let base = reweigh_with(n, |i| b[i], |_| 0.0);
    let sel = reweigh_with(n, |i| b[i] - q[i], |_| 0.0);
    // work relative to the selected shift: e_i * u_i / exp(sel.shift)
    let log_z = sel.log_mass() - base.log_mass();
    let mut acc = 0.0;
    for i in 0..n {
        let u_rel = (b[i] - base.shift).exp() / base.sum_w;
        let ratio = ((-q[i]) - log_z).exp(); // e_i / Z
        acc += (u_rel * (ratio - 1.0)).powi(2);
    }
    Ok(acc.sqrt())
}

/// `E_Sel(H | sigma)`: the selected-law mean homozygosity. Non-increasing
/// in `sigma` for a fixed pool.
pub fn g_sigma(pool: &WeightedPool, sigma: f64) -> Estimate {
    let h = pool.homozygosities();
    let r = reweigh_symmetric(pool, sigma, |i| h[i]);
    Estimate {
        value: r.mean().clamp(pool.min_homozygosity(), pool.max_homozygosity()),
        ess: r.report(pool),
    }
}

/// Cheap `g_sigma` for root-finding loops.
pub(crate) fn mean_homozygosity(pool: &WeightedPool, sigma: f64) -> f64 {
    let h = pool.homozygosities();
    reweigh_symmetric(pool, sigma, |i| h[i])
        .mean()
        .clamp(pool.min_homozygosity(), pool.max_homozygosity())
}

/// `Var_Sel(H | sigma)`, minus the derivative of `g_sigma`.
pub fn var_homozygosity(pool: &WeightedPool, sigma: f64) -> f64 {
    let h = pool.homozygosities();
    let mean = mean_homozygosity(pool, sigma);
    reweigh_symmetric(pool, sigma, |i| (h[i] - mean).powi(2)).mean()
}

/// Derivative of the symmetric-model log-likelihood in `sigma`:
/// `-h + E_Sel(H | sigma)`.
pub fn score_sigma(h: Homozygosity, pool: &WeightedPool, sigma: f64) -> Estimate {
    let g = g_sigma(pool, sigma);
    Estimate {
        value: g.value - h.value(),
        ess: g.ess,
    }
}

/// Gradient of the log-likelihood in each `sigma_ij`:
/// `E_Sel(X_i X_j | S) - x_i x_j`, returned row-major as a `k x k` matrix.
pub fn score_general(
    x: &crate::model::SimplexPoint,
    pool: &WeightedPool,
    model: &SelectionModel,
) -> Result<(Vec<Vec<f64>>, EssReport)> {
    let k = pool.k();
    if x.k() != k {
        return Err(Error::DimensionMismatch { expected: k, found: x.k() });
    }
    let draws = pool.draws_flat().ok_or(Error::DrawsNotRetained)?;
    let q = exponents(pool, model)?;
    let b = pool.base_log_weights();
    let n = pool.len();
    let shift = (0..n).map(|i| b[i] - q[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut second = vec![0.0; k * k];
    let mut weights = Reweighting {
        shift,
        sum_w: 0.0,
        sum_w2: 0.0,
        sum_wv: 0.0,
        w_min: f64::INFINITY,
        w_max: 0.0,
    };
    for (i, d) in draws.chunks(k).enumerate() {
        let w = (b[i] - q[i] - shift).exp();
        weights.sum_w += w;
        weights.sum_w2 += w * w;
        weights.w_min = weights.w_min.min(w);
        weights.w_max = weights.w_max.max(w);
        for a in 0..k {
            let wa = w * d[a];
            for c in a..k {
                second[a * k + c] += wa * d[c];
            }
        }
    }
    let xv = x.values();
    let mut out = vec![vec![0.0; k]; k];
    for a in 0..k {
        for c in a..k {
            let v = second[a * k + c] / weights.sum_w - xv[a] * xv[c];
            out[a][c] = v;
            out[c][a] = v;
        }
    }
    Ok((out, weights.report(pool)))
}

/// `P_Sel(H <= h | sigma)`. Non-decreasing in `sigma` for a fixed pool.
pub fn cdf_homozygosity(pool: &WeightedPool, sigma: f64, h: Homozygosity) -> Estimate {
    let hs = pool.homozygosities();
    let cut = h.value();
    let r = reweigh_symmetric(pool, sigma, |i| if hs[i] <= cut { 1.0 } else { 0.0 });
    Estimate {
        value: r.mean().clamp(0.0, 1.0),
        ess: r.report(pool),
    }
}

/// Selected-law mass of `H` in `bins` equal bins of `width` from `lo`.
pub(crate) fn reweigh_symmetric_masses(pool: &WeightedPool, sigma: f64, bins: usize, lo: f64, width: f64) -> Vec<f64> {
    let hs = pool.homozygosities();
    let b = pool.base_log_weights();
    let shift = (0..pool.len()).map(|i| b[i] - sigma * hs[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut mass = vec![0.0; bins];
    let mut total = 0.0;
    for i in 0..pool.len() {
        let w = (b[i] - sigma * hs[i] - shift).exp();
        let bin = (((hs[i] - lo) / width).max(0.0) as usize).min(bins - 1);
        mass[bin] += w;
        total += w;
    }
    mass.iter_mut().for_each(|m| *m /= total);
    mass
}

/// Weighted quantile of `H` under the selected law.
pub fn quantile_homozygosity(pool: &WeightedPool, sigma: f64, p: f64) -> f64 {
    let hs = pool.homozygosities();
    let b = pool.base_log_weights();
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    idx.sort_by(|&a, &c| hs[a].total_cmp(&hs[c]));
    let shift = (0..pool.len()).map(|i| b[i] - sigma * hs[i]).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = idx.iter().map(|&i| (b[i] - sigma * hs[i] - shift).exp()).collect();
    let total: f64 = w.iter().sum();
    let target = p.clamp(0.0, 1.0) * total;
    let mut acc = 0.0;
    for (j, &i) in idx.iter().enumerate() {
        acc += w[j];
        if acc >= target {
            return hs[i];
        }
    }
    hs[*idx.last().unwrap()]
}
