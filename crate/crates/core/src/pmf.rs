//! Probability mass functions: discretisation, convolution and divergences.
//!
//! All logarithms are natural and `0 · log 0` is taken as 0.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use thiserror::Error;

use crate::math;

/// Largest tolerated deviation of a stored PMF's sum from 1.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Inputs whose sum is within this distance of 1 are renormalised on construction.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PmfError {
    #[error("probability vector is empty")]
    Empty,
    #[error("entry {index} is negative or not finite ({value})")]
    InvalidEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("divergence undefined: p[{index}] > 0 while r[{index}] = 0")]
    DivergenceUndefined { index: usize },
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(&'static str),
}

/// A nonnegative vector summing to 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<f64>", into = "Vec<f64>")
)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    /// Validates `values`, renormalising once if the sum is within
    /// [`RENORMALIZE_TOLERANCE`] of 1.
    pub fn new(values: Vec<f64>) -> Result<Self, PmfError> {
        if values.is_empty() {
            return Err(PmfError::Empty);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(PmfError::InvalidEntry { index, value });
        }
        let sum: f64 = values.iter().sum();
        if math::abs(sum - 1.0) > RENORMALIZE_TOLERANCE {
            return Err(PmfError::NotNormalized { sum });
        }
        let mut values = values;
        if sum != 1.0 {
            values.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Pmf(values))
    }

    /// Scales an arbitrary nonnegative weight vector to a PMF.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, PmfError> {
        if weights.is_empty() {
            return Err(PmfError::Empty);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(PmfError::InvalidEntry { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(PmfError::NotNormalized { sum });
        }
        Ok(Pmf(weights.into_iter().map(|w| w / sum).collect()))
    }

    /// All mass on `index`.
    pub fn delta(len: usize, index: usize) -> Self {
        assert!(index < len, "delta index {index} out of range for length {len}");
        let mut values = vec![0.0; len];
        values[index] = 1.0;
        Pmf(values)
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform PMF needs at least one entry");
        Pmf(vec![1.0 / len as f64; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Copy extended with zeros to `len` entries (no-op when already that long).
    pub fn padded(&self, len: usize) -> Pmf {
        let mut values = self.0.clone();
        if values.len() < len {
            values.resize(len, 0.0);
        }
        Pmf(values)
    }
}

impl Deref for Pmf {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Pmf {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = PmfError;

    fn try_from(values: Vec<f64>) -> Result<Self, PmfError> {
        Pmf::new(values)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Vec<f64> {
        p.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Family {
    Gaussian,
    Laplace,
}

/// How a continuous density becomes `points` probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "camelCase")
)]
pub enum DiscretizationRule {
    /// Density sampled at `points` equispaced nodes spanning the range, then normalised.
    #[default]
    Pointwise,
    /// Exact probability of `points` equal-width cells tiling the range, then normalised.
    CellIntegral,
}

/// A target distribution and its grid.
///
/// The grid covers `location ± halfWidth · scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "camelCase")
)]
pub struct DistributionSpec {
    pub family: Family,
    pub location: f64,
    /// σ for the Gaussian, θ for the Laplace density.
    pub scale: f64,
    pub points: usize,
    pub half_width: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub rule: DiscretizationRule,
}

impl DistributionSpec {
    pub const DEFAULT_HALF_WIDTH: f64 = 3.0;

    pub fn gaussian(location: f64, scale: f64, points: usize) -> Self {
        DistributionSpec {
            family: Family::Gaussian,
            location,
            scale,
            points,
            half_width: Self::DEFAULT_HALF_WIDTH,
            rule: DiscretizationRule::Pointwise,
        }
    }

    pub fn laplace(location: f64, scale: f64, points: usize) -> Self {
        DistributionSpec {
            family: Family::Laplace,
            ..Self::gaussian(location, scale, points)
        }
    }

    pub fn with_half_width(mut self, half_width: f64) -> Self {
        self.half_width = half_width;
        self
    }

    pub fn with_rule(mut self, rule: DiscretizationRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<(), PmfError> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(PmfError::InvalidSpec("scale must be positive and finite"));
        }
        if self.points == 0 {
            return Err(PmfError::InvalidSpec("points must be at least 1"));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(PmfError::InvalidSpec("halfWidth must be positive and finite"));
        }
        if !self.location.is_finite() {
            return Err(PmfError::InvalidSpec("location must be finite"));
        }
        Ok(())
    }

    /// Density in standardised units `z = (x - location) / scale`, up to the
    /// constant `1 / scale` (which cancels on normalisation).
    fn standard_pdf(&self, z: f64) -> f64 {
        match self.family {
            Family::Gaussian => {
                math::exp(-0.5 * z * z) / math::sqrt(2.0 * core::f64::consts::PI)
            }
            Family::Laplace => 0.5 * math::exp(-math::abs(z)),
        }
    }

    /// Probability of the standardised interval `[lo, hi]`.
    fn standard_mass(&self, lo: f64, hi: f64) -> f64 {
        match self.family {
            Family::Gaussian => {
                let s = core::f64::consts::FRAC_1_SQRT_2;
                0.5 * (math::erf(hi * s) - math::erf(lo * s))
            }
            Family::Laplace => laplace_cdf(hi) - laplace_cdf(lo),
        }
    }
}

fn laplace_cdf(z: f64) -> f64 {
    if z < 0.0 {
        0.5 * math::exp(z)
    } else {
        // 1 - e^{-z}/2, written to keep precision near z = 0
        0.5 - 0.5 * math::expm1(-z)
    }
}

/// Discretises `spec` into a PMF of `spec.points` entries.
///
/// Node (or cell edge) positions are computed in standardised units from
/// integer offsets, so symmetric densities produce exactly palindromic
/// vectors regardless of `location`.
pub fn discretize(spec: &DistributionSpec) -> Result<Pmf, PmfError> {
    spec.validate()?;
    let n = spec.points;
    let h = spec.half_width;
    let weights: Vec<f64> = match spec.rule {
        DiscretizationRule::Pointwise => {
            if n == 1 {
                vec![spec.standard_pdf(0.0)]
            } else {
                let span = (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        let z = h * (2.0 * k as f64 - span) / span;
                        spec.standard_pdf(z)
                    })
                    .collect()
            }
        }
        DiscretizationRule::CellIntegral => {
            let edge = |k: usize| h * (2.0 * k as f64 - n as f64) / n as f64;
            (0..n)
                .map(|k| spec.standard_mass(edge(k), edge(k + 1)))
                .collect()
        }
    };
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(PmfError::InvalidSpec("density evaluation is not finite"));
    }
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return Err(PmfError::InvalidSpec("density underflows on the grid"));
    }
    Ok(Pmf(weights.into_iter().map(|w| w / sum).collect()))
}

/// Full linear convolution of two coefficient vectors.
pub fn convolve_slices(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (u, &pu) in p.iter().enumerate() {
        for (v, &qv) in q.iter().enumerate() {
            out[u + v] += pu * qv;
        }
    }
    out
}

/// Distribution of the sum of independent variables with PMFs `p` and `q`.
pub fn convolve(p: &Pmf, q: &Pmf) -> Pmf {
    let mut out = convolve_slices(p, q);
    let sum: f64 = out.iter().sum();
    // the exact product of two unit sums is 1; rescale away rounding drift
    out.iter_mut().for_each(|v| *v /= sum);
    Pmf(out)
}

/// Left fold of [`convolve`] over `factors`.
pub fn convolve_all<'a, I>(factors: I) -> Option<Pmf>
where
    I: IntoIterator<Item = &'a Pmf>,
{
    let mut iter = factors.into_iter();
    let first = iter.next()?.clone();
    Some(iter.fold(first, |acc, f| convolve(&acc, f)))
}

/// Kullback–Leibler divergence `Σ p_i log(p_i / r_i)`.
pub fn kl_divergence(p: &[f64], r: &[f64]) -> Result<f64, PmfError> {
    if p.len() != r.len() {
        return Err(PmfError::LengthMismatch {
            left: p.len(),
            right: r.len(),
        });
    }
    let mut total = 0.0;
    for (i, (&pi, &ri)) in p.iter().zip(r).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if ri == 0.0 {
            return Err(PmfError::DivergenceUndefined { index: i });
        }
        total += pi * math::ln(pi / ri);
    }
    Ok(total)
}

/// Jensen–Shannon cost `KL(p‖m) + KL(q‖m)` with `m = (p + q) / 2`.
///
/// This is twice the usual Jensen–Shannon divergence: there is no ½ prefactor
/// and no square root. Ranges over `[0, 2 log 2]`.
pub fn js_cost(p: &[f64], q: &[f64]) -> Result<f64, PmfError> {
    if p.len() != q.len() {
        return Err(PmfError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let mi = 0.5 * (pi + qi);
        if pi > 0.0 {
            total += pi * math::ln(pi / mi);
        }
        if qi > 0.0 {
            total += qi * math::ln(qi / mi);
        }
    }
    // rounding can leave a tiny negative sum for near-identical inputs
    Ok(total.max(0.0))
}

/// [`js_cost`] after zero-padding the shorter argument.
pub fn js_cost_padded(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let mut pp = p.to_vec();
    let mut qq = q.to_vec();
    pp.resize(len, 0.0);
    qq.resize(len, 0.0);
    js_cost(&pp, &qq).expect("padded to equal length")
}
