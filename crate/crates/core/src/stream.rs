//! Seed derivation and log-space Dirichlet draws.
//!
//! Every random quantity in the crate comes from a counter-based substream
//! `(seed, stream, index)`. A pool draw, a bootstrap replicate or a
//! rejection-sampled point owns its own generator, so results do not depend
//! on how work is split across threads.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma, Open01};
use rand_pcg::Pcg64Mcg;

use crate::error::{invalid, Result};

pub type StreamRng = Pcg64Mcg;

/// Named substream families. Values are part of the reproducibility
/// contract: changing one changes every downstream result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Pool = 1,
    Neutral = 2,
    Rejection = 3,
    Chain = 4,
    Bootstrap = 5,
    Posterior = 6,
    Study = 7,
    Optimizer = 8,
    Tuning = 9,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `(seed, stream, index)`.
pub fn substream(seed: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(stream as u64)) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng_for(seed: u64, stream: Stream, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(substream(seed, stream, index))
}

/// Dirichlet sampler returning log-coordinates, so tiny concentrations
/// (`theta / k` well below 1) never underflow to exact zeros.
#[derive(Debug, Clone)]
pub struct LogDirichlet {
    alphas: Vec<f64>,
    gammas: Vec<Gamma<f64>>,
}

impl LogDirichlet {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(invalid("Dirichlet needs at least 2 components"));
        }
        let gammas = alphas
            .iter()
            .map(|&a| {
                if !(a.is_finite() && a > 0.0) {
                    return Err(invalid(format!("Dirichlet concentration must be positive, got {a}")));
                }
                // shapes below 1 are boosted: G(a) = G(a + 1) * U^(1/a)
                let shape = if a < 1.0 { a + 1.0 } else { a };
                Gamma::new(shape, 1.0).map_err(|e| invalid(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { alphas, gammas })
    }

    pub fn symmetric(alpha: f64, k: usize) -> Result<Self> {
        Self::new(vec![alpha; k])
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Writes normalized log-frequencies into `log_x`.
    pub fn sample_log<R: Rng + ?Sized>(&self, rng: &mut R, log_x: &mut [f64]) {
        debug_assert_eq!(log_x.len(), self.k());
        let mut max = f64::NEG_INFINITY;
        for ((slot, gamma), &alpha) in log_x.iter_mut().zip(&self.gammas).zip(&self.alphas) {
            let mut v = gamma.sample(rng).ln();
            if alpha < 1.0 {
                let u: f64 = rng.sample(Open01);
                v += u.ln() / alpha;
            }
            *slot = v;
            max = max.max(v);
        }
        let total: f64 = log_x.iter().map(|v| (v - max).exp()).sum();
        let log_norm = max + total.ln();
        for v in log_x.iter_mut() {
            *v -= log_norm;
        }
    }

    /// Log density at a point given by its log-coordinates.
    pub fn log_density(&self, log_x: &[f64]) -> f64 {
        dirichlet_log_density(&self.alphas, log_x)
    }
}

/// `log Dir(x | alphas)` from log-coordinates.
pub fn dirichlet_log_density(alphas: &[f64], log_x: &[f64]) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let total: f64 = alphas.iter().sum();
    let mut acc = ln_gamma(total);
    for (&a, &lx) in alphas.iter().zip(log_x) {
        acc += (a - 1.0) * lx - ln_gamma(a);
    }
    acc
}

/// Converts log-coordinates into strictly positive frequencies. Entries
/// that underflow are floored at the smallest normal double.
pub(crate) fn exp_clamped(log_x: &[f64]) -> Vec<f64> {
    log_x.iter().map(|v| v.exp().max(f64::MIN_POSITIVE)).collect()
}
