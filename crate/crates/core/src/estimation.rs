//! Maximum-likelihood fitting of `(Σ, L)` with a Box–Snell bias correction
//! of the number of looks.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix3;
use crate::math;
use crate::special::{ln_multigamma3, polygamma3};
use crate::wishart::MIN_LOOKS;

/// Search bracket for the looks equation.
pub const LOOKS_BRACKET: (f64, f64) = (MIN_LOOKS + 1e-6, 1e4);
pub const LOOKS_TOL: f64 = 1e-10;

/// Sufficient statistics of a covariance sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    /// Sample mean `Z̄`.
    pub mean: HermitianMatrix3,
    /// `N⁻¹ Σ ln|Z_k|`.
    pub mean_log_det: f64,
}

impl SampleStats {
    pub fn from_sample(sample: &[HermitianMatrix3]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut log_dets = Vec::with_capacity(sample.len());
        for z in sample {
            if !z.is_positive_definite() {
                return Err(Error::InvalidObservation);
            }
            log_dets.push(math::ln(z.determinant()));
        }
        Ok(Self {
            n: sample.len(),
            mean: estimate_sigma(sample)?,
            mean_log_det: pairwise_sum(&log_dets) / sample.len() as f64,
        })
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

fn pairwise_matrix_sum(v: &[HermitianMatrix3]) -> HermitianMatrix3 {
    if v.len() <= 16 {
        v.iter().fold(HermitianMatrix3::zero(), |acc, m| acc + *m)
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_matrix_sum(a) + pairwise_matrix_sum(b)
    }
}

/// ML estimate of `Σ`: the entrywise sample mean.
pub fn estimate_sigma(sample: &[HermitianMatrix3]) -> Result<HermitianMatrix3> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(pairwise_matrix_sum(sample) * (1.0 / sample.len() as f64))
}

/// Score of the looks equation,
/// `3 ln L + N⁻¹ Σ ln|Z_k| − ln|Z̄| − ψ₃⁽⁰⁾(L)`. Strictly decreasing in `L`.
pub fn looks_score(stats: &SampleStats, l: f64) -> Result<f64> {
    Ok(3.0 * math::ln(l) + stats.mean_log_det - math::ln(stats.mean.determinant()) - polygamma3(0, l)?)
}

fn looks_score_derivative(l: f64) -> Result<f64> {
    Ok(3.0 / l - polygamma3(1, l)?)
}

/// Solves the looks equation on [`LOOKS_BRACKET`] by bisection followed by a
/// Newton polish.
///
/// [`Error::NoRoot`] carries the bracket end to clamp to: the top when the
/// score is positive everywhere (too little dispersion), the bottom when it
/// is negative everywhere.
pub fn estimate_looks_ml(stats: &SampleStats) -> Result<f64> {
    let (mut lo, mut hi) = LOOKS_BRACKET;
    let f_lo = looks_score(stats, lo)?;
    let f_hi = looks_score(stats, hi)?;
    if !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::DomainError("looks score is not finite"));
    }
    if f_hi > 0.0 {
        return Err(Error::NoRoot { clamp: LOOKS_BRACKET.1 });
    }
    if f_lo < 0.0 {
        return Err(Error::NoRoot { clamp: LOOKS_BRACKET.0 });
    }
    for _ in 0..200 {
        if hi - lo <= LOOKS_TOL * 0.25 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if looks_score(stats, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut l = 0.5 * (lo + hi);
    for _ in 0..3 {
        let f = looks_score(stats, l)?;
        let df = looks_score_derivative(l)?;
        if f == 0.0 || df == 0.0 {
            break;
        }
        let next = l - f / df;
        if !(next > lo - LOOKS_TOL && next < hi + LOOKS_TOL) {
            break;
        }
        l = next;
    }
    Ok(l)
}

/// Box–Snell first-order bias of the ML looks estimator.
pub fn box_snell_bias(l: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let excess = polygamma3(1, l)? - 3.0 / l;
    if !(excess > 0.0) {
        return Err(Error::DomainError("trigamma excess must be positive"));
    }
    let n = n as f64;
    Ok(9.0 / (2.0 * n * l * excess) - (1.5 / l + polygamma3(2, l)?) / (2.0 * n * excess))
}

/// Outcome of the bias-corrected looks estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LooksEstimate {
    pub ml: f64,
    pub bias: f64,
    /// `ml − bias`, clamped below at 3.
    pub corrected: f64,
    /// Set when the corrected value had to be raised to 3.
    pub clamped: bool,
}

/// `L̃ = L̂_ML − B̂(L̂_ML)`, clamped to `L ≥ 3`.
pub fn estimate_looks_corrected(stats: &SampleStats) -> Result<LooksEstimate> {
    let ml = estimate_looks_ml(stats)?;
    correct_looks(ml, stats.n)
}

/// Applies the bias correction to an already computed ML estimate.
pub fn correct_looks(ml: f64, n: usize) -> Result<LooksEstimate> {
    let bias = box_snell_bias(ml, n)?;
    let raw = ml - bias;
    let clamped = raw < MIN_LOOKS;
    Ok(LooksEstimate { ml, bias, corrected: if clamped { MIN_LOOKS } else { raw }, clamped })
}

/// Full Wishart log-likelihood `ℓ(Σ, L)` of a sample summarized by `stats`.
/// Only used to cross-check the estimators.
pub fn log_likelihood(stats: &SampleStats, sigma: &HermitianMatrix3, l: f64) -> Result<f64> {
    let n = stats.n as f64;
    let inv = sigma.inverse()?;
    Ok(3.0 * n * l * math::ln(l) + (l - 3.0) * n * stats.mean_log_det
        - l * n * math::ln(sigma.determinant())
        - n * ln_multigamma3(l)
        - n * l * inv.trace_product(&stats.mean))
}
