//! The scaled complex Wishart law `𝒲(Σ, L)` of a multilook covariance matrix.

use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hermitian::{Complex, HermitianMatrix3};
use crate::math;
use crate::special::ln_multigamma3;

/// Smallest number of looks for which the density exists.
pub const MIN_LOOKS: f64 = 3.0;

/// Covariance `Σ` plus equivalent number of looks `L`.
///
/// The inverse and log-determinant of `Σ` are cached at construction since
/// every density and distance evaluation needs them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WishartModel {
    sigma: HermitianMatrix3,
    looks: f64,
    sigma_inv: HermitianMatrix3,
    ln_det_sigma: f64,
}

impl WishartModel {
    pub fn new(sigma: HermitianMatrix3, looks: f64) -> Result<Self> {
        if !(looks >= MIN_LOOKS) || !looks.is_finite() {
            return Err(Error::InvalidLooks(looks));
        }
        if !sigma.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let sigma_inv = sigma.inverse()?;
        Ok(Self { sigma, looks, sigma_inv, ln_det_sigma: math::ln(sigma.determinant()) })
    }

    pub fn sigma(&self) -> &HermitianMatrix3 {
        &self.sigma
    }

    pub fn looks(&self) -> f64 {
        self.looks
    }

    pub fn sigma_inv(&self) -> &HermitianMatrix3 {
        &self.sigma_inv
    }

    pub fn ln_det_sigma(&self) -> f64 {
        self.ln_det_sigma
    }

    /// Same covariance, different number of looks.
    pub fn with_looks(&self, looks: f64) -> Result<Self> {
        if !(looks >= MIN_LOOKS) || !looks.is_finite() {
            return Err(Error::InvalidLooks(looks));
        }
        Ok(Self { looks, ..*self })
    }

    /// `ln f(z; Σ, L)`.
    pub fn log_density(&self, z: &HermitianMatrix3) -> Result<f64> {
        if !z.is_positive_definite() {
            return Err(Error::InvalidObservation);
        }
        let l = self.looks;
        Ok(3.0 * l * math::ln(l) + (l - 3.0) * math::ln(z.determinant())
            - l * self.ln_det_sigma
            - ln_multigamma3(l)
            - l * self.sigma_inv.trace_product(z))
    }

    /// Draws `Z = (1/L) Σᵢ sᵢ sᵢ*` with `sᵢ = A uᵢ`, `A` the Cholesky factor
    /// of `Σ` and `uᵢ` standard circular complex Gaussian vectors.
    ///
    /// Requires an integer number of looks.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<HermitianMatrix3> {
        let l = self.looks;
        if l < MIN_LOOKS || libm::trunc(l) != l || l > u32::MAX as f64 {
            return Err(Error::InvalidLooks(l));
        }
        let factor = self.sigma.cholesky()?;
        let n = l as u32;
        let mut acc = HermitianMatrix3::zero();
        for _ in 0..n {
            let u = [circular_gaussian(rng), circular_gaussian(rng), circular_gaussian(rng)];
            acc += HermitianMatrix3::outer(&factor.apply(&u));
        }
        Ok(acc * (1.0 / l))
    }
}

/// Complex normal with `E|u|² = 1`: real and imaginary parts `N(0, 1/2)`.
pub fn circular_gaussian<R: RngCore + ?Sized>(rng: &mut R) -> Complex {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re * scale, im * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn sigma0() -> HermitianMatrix3 {
        HermitianMatrix3::new([2.0, 1.0, 1.5], c(0.3, 0.2), c(0.6, -0.4), c(-0.1, 0.25))
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(WishartModel::new(sigma0(), 2.5), Err(Error::InvalidLooks(2.5)));
        assert!(WishartModel::new(HermitianMatrix3::diag(1.0, -1.0, 1.0), 4.0).is_err());
        let m = WishartModel::new(sigma0(), 4.0).unwrap();
        assert_eq!(m.log_density(&HermitianMatrix3::diag(1.0, 0.0, 1.0)), Err(Error::InvalidObservation));
    }

    #[test]
    fn identity_density_at_three_looks() {
        let m = WishartModel::new(HermitianMatrix3::identity(), 3.0).unwrap();
        let expected =
            9.0 * 3f64.ln() - 3.0 * core::f64::consts::PI.ln() - (ln_gamma(3.0) + ln_gamma(2.0) + ln_gamma(1.0)) - 9.0;
        let got = m.log_density(&HermitianMatrix3::identity()).unwrap();
        assert!((got - expected).abs() < 1e-12);
        // Γ(3)Γ(2)Γ(1) = 2
        assert!((got - (9.0 * 3f64.ln() - 3.0 * core::f64::consts::PI.ln() - 2f64.ln() - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn mode_is_scaled_sigma() {
        let l = 6.0;
        let m = WishartModel::new(sigma0(), l).unwrap();
        let mode = sigma0() * ((l - 3.0) / l);
        let best = m.log_density(&mode).unwrap();
        let dirs = [
            HermitianMatrix3::diag(1.0, 0.0, 0.0),
            HermitianMatrix3::diag(0.0, 1.0, -1.0),
            HermitianMatrix3::new([0.0; 3], c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            HermitianMatrix3::new([0.0; 3], c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)),
            HermitianMatrix3::new([0.0; 3], c(0.0, 0.0), c(0.0, 0.0), c(0.5, -0.5)),
        ];
        for d in dirs {
            for eps in [1e-3, -1e-3] {
                assert!(m.log_density(&(mode + d * eps)).unwrap() < best);
            }
        }
    }

    #[test]
    fn simultaneous_scaling_shifts_by_jacobian() {
        let m = WishartModel::new(sigma0(), 4.5).unwrap();
        let z = HermitianMatrix3::new([1.0, 2.0, 1.2], c(0.1, 0.1), c(0.2, 0.0), c(0.0, -0.3));
        for cst in [0.1, 2.0, 17.0] {
            let scaled = WishartModel::new(sigma0() * cst, 4.5).unwrap();
            let lhs = scaled.log_density(&(z * cst)).unwrap();
            let rhs = m.log_density(&z).unwrap() - 9.0 * f64::ln(cst);
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let m = WishartModel::new(sigma0(), 4.0).unwrap();
        let a = m.sample(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = m.sample(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_positive_definite());
    }

    #[test]
    fn sampling_requires_integer_looks() {
        let m = WishartModel::new(sigma0(), 4.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(m.sample(&mut rng), Err(Error::InvalidLooks(4.5)));
    }
}
