//! Explicit two-step scheme for the diffusion-reaction evolution of a
//! covariance field.
//!
//! Each iteration first diffuses every matrix entry with the five-point
//! Laplacian, then pulls every pixel towards its nearest prototype by an
//! exponential factor:
//!
//! ```text
//! Σ'   = Σ + αδt/h² · (Σ_E + Σ_W + Σ_N + Σ_S − 4Σ)
//! Σ⁺   = Σ_m + exp(δt·(d_min − d_runner_up)) · (Σ' − Σ_m)
//! ```
//!
//! where `m` is the nearest prototype of `Σ'` under the weighted distance.
//! With `1 − 4αδt/h² ≥ 0` both steps are convex combinations, so every pixel
//! stays Hermitian positive definite. Edges are replicated (zero flux).

use alloc::vec::Vec;

use crate::classify::PrototypeSet;
use crate::distance::DistanceKind;
use crate::error::{Error, Result};
use crate::grid::{CovarianceField, Grid};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub alpha: f64,
    pub dt: f64,
    /// Grid spacing.
    pub h: f64,
    pub iterations: usize,
    /// Distance driving the reaction term.
    pub distance: DistanceKind,
    /// Multiply distances by the prototype weights.
    pub weighted: bool,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self { alpha: 0.5, dt: 0.01, h: 1.0, iterations: 50, distance: DistanceKind::KullbackLeibler, weighted: true }
    }
}

impl EvolutionParams {
    /// `1 − 4αδt/h²`; the scheme is well defined when this is non-negative.
    pub fn stability_margin(&self) -> f64 {
        1.0 - 4.0 * self.alpha * self.dt / (self.h * self.h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::DomainError("alpha must be finite and non-negative"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::DomainError("dt must be finite and positive"));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::DomainError("h must be finite and positive"));
        }
        let margin = self.stability_margin();
        if margin < 0.0 {
            return Err(Error::StabilityViolation { margin });
        }
        Ok(())
    }
}

/// One row of the evolution log. Iteration 0 describes the input field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationMetrics {
    pub iteration: usize,
    /// Mean over pixels of the (weighted) distance to the nearest prototype.
    pub mean_weighted_distance: f64,
    /// Fraction of pixels whose nearest prototype differs from the previous
    /// iteration.
    pub changed_fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolutionMetrics {
    pub iterations: Vec<IterationMetrics>,
}

/// Five-point diffusion with replicated edges.
pub fn diffusion_step(field: &CovarianceField, params: &EvolutionParams) -> Result<CovarianceField> {
    params.validate()?;
    let r = params.alpha * params.dt / (params.h * params.h);
    let (w, h) = (field.width(), field.height());
    if r == 0.0 || field.is_empty() {
        return Ok(field.clone());
    }
    Ok(Grid::from_fn(w, h, |x, y| {
        let c = *field.get(x, y);
        let east = *field.get((x + 1).min(w - 1), y);
        let west = *field.get(x.saturating_sub(1), y);
        let south = *field.get(x, (y + 1).min(h - 1));
        let north = *field.get(x, y.saturating_sub(1));
        c + (east + west + south + north - c * 4.0) * r
    }))
}

/// Moves every pixel towards its nearest prototype.
pub fn reaction_step(
    field: &CovarianceField,
    protos: &PrototypeSet,
    params: &EvolutionParams,
) -> Result<CovarianceField> {
    let pixels = field
        .as_slice()
        .iter()
        .map(|s| {
            let near = protos.nearest(s, params.distance, params.weighted)?;
            let target = *protos.sigma(near.class);
            let exponent = (params.dt * (near.distance - near.runner_up)).min(0.0);
            Ok(target + (*s - target) * math::exp(exponent))
        })
        .collect::<Result<Vec<_>>>()?;
    Grid::from_vec(field.width(), field.height(), pixels)
}

fn nearest_summary(
    field: &CovarianceField,
    protos: &PrototypeSet,
    params: &EvolutionParams,
) -> Result<(Vec<usize>, f64)> {
    let mut labels = Vec::with_capacity(field.len());
    let mut total = 0.0;
    for s in field.as_slice() {
        let near = protos.nearest(s, params.distance, params.weighted)?;
        labels.push(near.class);
        total += near.distance;
    }
    Ok((labels, total / field.len().max(1) as f64))
}

/// Runs `params.iterations` diffusion + reaction iterations.
pub fn evolve(
    field: &CovarianceField,
    protos: &PrototypeSet,
    params: &EvolutionParams,
) -> Result<(CovarianceField, EvolutionMetrics)> {
    evolve_with(field, protos, params, |_, _| {})
}

/// [`evolve`] with a hook called after every iteration with the iteration
/// number and the current field.
pub fn evolve_with(
    field: &CovarianceField,
    protos: &PrototypeSet,
    params: &EvolutionParams,
    mut on_iteration: impl FnMut(usize, &CovarianceField),
) -> Result<(CovarianceField, EvolutionMetrics)> {
    params.validate()?;
    let (mut previous, initial_mean) = nearest_summary(field, protos, params)?;
    let mut metrics = EvolutionMetrics {
        iterations: alloc::vec![IterationMetrics {
            iteration: 0,
            mean_weighted_distance: initial_mean,
            changed_fraction: 0.0,
        }],
    };
    let mut current = field.clone();
    for iteration in 1..=params.iterations {
        let diffused = diffusion_step(&current, params)?;
        current = reaction_step(&diffused, protos, params)?;
        let (labels, mean) = nearest_summary(&current, protos, params)?;
        let changed = labels.iter().zip(&previous).filter(|(a, b)| a != b).count();
        metrics.iterations.push(IterationMetrics {
            iteration,
            mean_weighted_distance: mean,
            changed_fraction: changed as f64 / labels.len().max(1) as f64,
        });
        previous = labels;
        on_iteration(iteration, &current);
    }
    Ok((current, metrics))
}
