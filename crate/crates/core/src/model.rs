//! Domain values: allele-frequency vectors, mutation and selection
//! parameters, and the two statistics everything else is built from
//! (homozygosity and the selection quadratic form).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Allele frequencies of a whole population: an interior point of the
/// probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint {
    values: Vec<f64>,
}

impl SimplexPoint {
    /// Sum tolerance for points produced by this crate.
    pub const INTERNAL_TOLERANCE: f64 = 1e-9;
    /// Sum tolerance for frequencies read from user data.
    pub const INGEST_TOLERANCE: f64 = 0.005;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, Self::INTERNAL_TOLERANCE)
    }

    /// Validates `values` against a sum tolerance. Values are never
    /// renormalized.
    pub fn with_tolerance(values: Vec<f64>, tolerance: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewAlleles(values.len()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteFrequency { index });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveFrequency { index, value });
            }
        }
        let sum = compensated_sum(values.iter().copied());
        let deviation = (sum - 1.0).abs();
        if deviation > tolerance {
            return Err(Error::SumMismatch {
                sum,
                deviation,
                tolerance,
            });
        }
        Ok(Self { values })
    }

    /// The centroid `(1/k, ..., 1/k)`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewAlleles(k));
        }
        Ok(Self {
            values: vec![1.0 / k as f64; k],
        })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn homozygosity(&self) -> Homozygosity {
        homozygosity(self)
    }

    pub fn sum_log(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| v.ln()))
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        SimplexPoint::new(values)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.values
    }
}

/// Scaled mutation rates, `theta = 4Nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MutationParams {
    /// Total rate `theta` split evenly, `theta / k` per allele.
    Symmetric { theta: f64, k: usize },
    /// One rate per allele.
    General { thetas: Vec<f64> },
}

impl MutationParams {
    pub fn symmetric(theta: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewAlleles(k));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(invalid(format!("theta must be positive, got {theta}")));
        }
        Ok(Self::Symmetric { theta, k })
    }

    pub fn general(thetas: Vec<f64>) -> Result<Self> {
        if thetas.len() < 2 {
            return Err(Error::TooFewAlleles(thetas.len()));
        }
        if let Some(bad) = thetas.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(invalid(format!("every theta_i must be positive, got {bad}")));
        }
        Ok(Self::General { thetas })
    }

    pub fn k(&self) -> usize {
        match self {
            Self::Symmetric { k, .. } => *k,
            Self::General { thetas } => thetas.len(),
        }
    }

    /// Sum of the per-allele rates.
    pub fn total(&self) -> f64 {
        match self {
            Self::Symmetric { theta, .. } => *theta,
            Self::General { thetas } => compensated_sum(thetas.iter().copied()),
        }
    }

    /// Dirichlet concentration parameters of the neutral law.
    pub fn per_allele(&self) -> Vec<f64> {
        match self {
            Self::Symmetric { theta, k } => vec![theta / *k as f64; *k],
            Self::General { thetas } => thetas.clone(),
        }
    }

    /// `Some(theta / k)` when every allele shares one rate.
    pub fn symmetric_rate(&self) -> Option<f64> {
        match self {
            Self::Symmetric { theta, k } => Some(theta / *k as f64),
            Self::General { .. } => None,
        }
    }
}

/// A symmetric `k x k` matrix of scaled selection intensities, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SelectionMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl SelectionMatrix {
    pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k < 2 {
            return Err(Error::TooFewAlleles(k));
        }
        let mut entries = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(invalid("selection matrix entries must be finite"));
            }
            entries.extend_from_slice(row);
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let (a, b) = (entries[i * k + j], entries[j * k + i]);
                let scale = a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() > Self::SYMMETRY_TOLERANCE * scale {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { k, entries })
    }

    /// `sigma * I_k`.
    pub fn scaled_identity(sigma: f64, k: usize) -> Self {
        let mut entries = vec![0.0; k * k];
        for i in 0..k {
            entries[i * k + i] = sigma;
        }
        Self { k, entries }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.k + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.k).map(<[f64]>::to_vec).collect()
    }

    /// `x' S x` for any vector of length k (no simplex checks).
    pub fn bilinear(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.k);
        compensated_sum(
            self.entries
                .chunks(self.k)
                .zip(x)
                .map(|(row, xi)| xi * row.iter().zip(x).map(|(s, xj)| s * xj).sum::<f64>()),
        )
    }

    /// Gradient of the quadratic form, `2 S x`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.k)
            .map(|row| 2.0 * row.iter().zip(x).map(|(s, xj)| s * xj).sum::<f64>())
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SelectionMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<SelectionMatrix> for Vec<Vec<f64>> {
    fn from(m: SelectionMatrix) -> Self {
        m.rows()
    }
}

/// Selection scheme entering the stationary density through `exp(-x' S x)`.
///
/// `Symmetric { sigma }` is shorthand for `S = sigma * I`: `sigma > 0` is
/// heterozygote advantage (symmetric overdominance) and `sigma < 0` is the
/// mirrored homozygote-advantage scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SelectionModel {
    Symmetric { sigma: f64 },
    General { matrix: SelectionMatrix },
}

impl SelectionModel {
    pub fn symmetric(sigma: f64) -> Self {
        Self::Symmetric { sigma }
    }

    pub fn general(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::General {
            matrix: SelectionMatrix::from_rows(rows)?,
        })
    }

    /// Required dimension, if the model fixes one.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Self::Symmetric { .. } => None,
            Self::General { matrix } => Some(matrix.k()),
        }
    }

    pub fn check_dimension(&self, k: usize) -> Result<()> {
        match self.dimension() {
            Some(d) if d != k => Err(Error::DimensionMismatch {
                expected: d,
                found: k,
            }),
            _ => Ok(()),
        }
    }

    /// Explicit matrix form for dimension `k`.
    pub fn to_matrix(&self, k: usize) -> Result<SelectionMatrix> {
        self.check_dimension(k)?;
        Ok(match self {
            Self::Symmetric { sigma } => SelectionMatrix::scaled_identity(*sigma, k),
            Self::General { matrix } => matrix.clone(),
        })
    }

    /// Evaluates the quadratic form on raw coordinates.
    pub(crate) fn evaluate(&self, x: &[f64], h: f64) -> f64 {
        match self {
            Self::Symmetric { sigma } => sigma * h,
            Self::General { matrix } => matrix.bilinear(x),
        }
    }
}

/// `h = sum x_i^2`, the probability that two genes drawn from the
/// population carry the same allele. Lies in `[1/k, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Homozygosity {
    value: f64,
    k: usize,
}

impl Homozygosity {
    const SLACK: f64 = 1e-12;

    pub fn new(value: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewAlleles(k));
        }
        let floor = 1.0 / k as f64;
        if !value.is_finite() || value < floor - Self::SLACK || value > 1.0 + Self::SLACK {
            return Err(invalid(format!(
                "homozygosity {value} outside [1/k, 1] = [{floor}, 1]"
            )));
        }
        Ok(Self { value, k })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Distance above the minimum `1/k`.
    pub fn excess(&self) -> f64 {
        self.value - 1.0 / self.k as f64
    }
}

/// Sum of squared coordinates with compensated accumulation.
pub(crate) fn sum_of_squares(x: &[f64]) -> f64 {
    compensated_sum(x.iter().map(|v| v * v))
}

pub fn homozygosity(x: &SimplexPoint) -> Homozygosity {
    let k = x.k();
    let raw = sum_of_squares(x.values());
    // Cauchy-Schwarz keeps the exact value at or above 1/k; rounding may not.
    let value = raw.clamp(1.0 / k as f64, 1.0);
    Homozygosity { value, k }
}

/// `x' S x`. For the symmetric model this is `sigma * h`.
pub fn quadratic_form(x: &SimplexPoint, model: &SelectionModel) -> Result<f64> {
    model.check_dimension(x.k())?;
    Ok(model.evaluate(x.values(), homozygosity(x).value()))
}

/// Bundled population data.
pub mod datasets {
    use super::SimplexPoint;

    /// Outer-surface-protein allele frequencies of *Borrelia burgdorferi*
    /// from eastern Long Island (Qiu et al. 1997, Hereditas 127).
    pub const LYME: [f64; 4] = [0.103, 0.375, 0.270, 0.252];

    /// KIR locus DL1/S1 frequencies, United Kingdom population
    /// (Norman et al. 2004, Immunogenetics 56, Table 2).
    pub const KIR: [f64; 8] = [0.22, 0.21, 0.17, 0.16, 0.15, 0.04, 0.03, 0.02];

    pub const NAMES: [&str; 2] = ["lyme", "kir"];

    pub fn by_name(name: &str) -> Option<SimplexPoint> {
        let values: &[f64] = match name.trim().to_ascii_lowercase().as_str() {
            "lyme" => &LYME,
            "kir" => &KIR,
            _ => return None,
        };
        Some(
            SimplexPoint::with_tolerance(values.to_vec(), SimplexPoint::INGEST_TOLERANCE)
                .expect("bundled datasets are valid"),
        )
    }

    pub fn lyme() -> SimplexPoint {
        by_name("lyme").unwrap()
    }

    pub fn kir() -> SimplexPoint {
        by_name("kir").unwrap()
    }
}

/// Parses a comma/whitespace separated list of frequencies, or one of the
/// bundled dataset names (`lyme`, `kir`).
pub fn parse_frequencies(text: &str) -> Result<SimplexPoint> {
    if let Some(point) = datasets::by_name(text) {
        return Ok(point);
    }
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|token| {
            token.parse::<f64>().map_err(|_| Error::BadToken {
                token: token.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SimplexPoint::with_tolerance(values, SimplexPoint::INGEST_TOLERANCE)
}
