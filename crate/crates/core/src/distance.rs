//! Closed-form stochastic distances between Wishart laws sharing `L`, plus
//! the Euclidean (Frobenius) baseline.
//!
//! The Hellinger distance uses the determinant of the harmonic mean of the
//! two covariances, so that `d_H(Σ, Σ) = 0` and `d_H ∈ [0, 1)`:
//!
//! ```text
//! d_H = 1 − [ |((Σ₁⁻¹ + Σ₂⁻¹)/2)⁻¹| / √(|Σ₁|·|Σ₂|) ]^L
//! ```

use crate::error::Result;
use crate::hermitian::HermitianMatrix3;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Euclidean,
    Hellinger,
    KullbackLeibler,
    Bhattacharyya,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 4] =
        [DistanceKind::Euclidean, DistanceKind::Hellinger, DistanceKind::KullbackLeibler, DistanceKind::Bhattacharyya];

    pub fn eval(self, s1: &HermitianMatrix3, s2: &HermitianMatrix3, l: f64) -> Result<f64> {
        match self {
            DistanceKind::Euclidean => Ok(euclidean_distance(s1, s2)),
            DistanceKind::Hellinger => hellinger_distance(s1, s2, l),
            DistanceKind::KullbackLeibler => kl_distance(s1, s2, l),
            DistanceKind::Bhattacharyya => bhattacharyya_distance(s1, s2, l),
        }
    }
}

/// Symmetrized Kullback–Leibler distance `L·[tr(Σ₁⁻¹Σ₂ + Σ₂⁻¹Σ₁)/2 − 3]`.
pub fn kl_distance(s1: &HermitianMatrix3, s2: &HermitianMatrix3, l: f64) -> Result<f64> {
    kl_distance_with_inverses(s1, &s1.inverse()?, s2, &s2.inverse()?, l)
}

/// [`kl_distance`] for callers that already hold both inverses.
pub fn kl_distance_with_inverses(
    s1: &HermitianMatrix3,
    s1_inv: &HermitianMatrix3,
    s2: &HermitianMatrix3,
    s2_inv: &HermitianMatrix3,
    l: f64,
) -> Result<f64> {
    if s1 == s2 {
        return Ok(0.0);
    }
    let t = s1_inv.trace_product(s2) + s2_inv.trace_product(s1);
    // Rounding can push an exact zero slightly negative.
    Ok((l * (0.5 * t - 3.0)).max(0.0))
}

/// `ln` of the Hellinger affinity bracket, i.e. `−d_B / L`. Always `≤ 0`.
fn log_affinity(s1: &HermitianMatrix3, s2: &HermitianMatrix3) -> Result<f64> {
    if s1 == s2 {
        s1.inverse()?;
        return Ok(0.0);
    }
    let harmonic = ((s1.inverse()? + s2.inverse()?) * 0.5).inverse()?;
    let log_ratio = math::ln(harmonic.determinant()) - 0.5 * (math::ln(s1.determinant()) + math::ln(s2.determinant()));
    Ok(log_ratio.min(0.0))
}

pub fn hellinger_distance(s1: &HermitianMatrix3, s2: &HermitianMatrix3, l: f64) -> Result<f64> {
    // 1 − e^{x} computed as −expm1(x) keeps small distances accurate.
    Ok(-libm::expm1(l * log_affinity(s1, s2)?))
}

/// `−ln(1 − d_H)`.
pub fn bhattacharyya_distance(s1: &HermitianMatrix3, s2: &HermitianMatrix3, l: f64) -> Result<f64> {
    Ok(-l * log_affinity(s1, s2)?)
}

pub fn euclidean_distance(s1: &HermitianMatrix3, s2: &HermitianMatrix3) -> f64 {
    s1.frobenius_distance(s2)
}

/// The Hellinger expression read literally, with the determinant of
/// `(Σ₁⁻¹ + Σ₂⁻¹)⁻¹` over `2√(|Σ₁||Σ₂|)`. It does not vanish at `Σ₁ = Σ₂`
/// (the bracket is `1/16` there); kept only to compare against other code.
#[cfg(feature = "printed-hellinger")]
pub fn hellinger_distance_as_printed(s1: &HermitianMatrix3, s2: &HermitianMatrix3, l: f64) -> Result<f64> {
    let numer = (s1.inverse()? + s2.inverse()?).inverse()?.determinant();
    let denom = 2.0 * math::sqrt(s1.determinant() * s2.determinant());
    Ok(1.0 - math::powf(numer / denom, l))
}
