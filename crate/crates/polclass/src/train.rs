//! Per-class estimation and weight fitting on the training half of the ROIs.

use polclass_core::classify::LooksMode;
use polclass_core::distance::DistanceKind;
use polclass_core::estimation::{correct_looks, estimate_looks_ml, LooksEstimate, SampleStats};
use polclass_core::weights::{optimize_weights, OptimizedWeights, OptimizerConfig, TrainingClass, TrainingSet};
use polclass_core::{CovarianceField, HermitianMatrix3};

use crate::error::{Error, Result};
use crate::model::{ClassModel, TrainedModel};
use crate::roi::Pixel;

/// Estimation details for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFit {
    pub samples: usize,
    pub looks: LooksEstimate,
    /// The looks equation had no root and the estimate sits at a bracket
    /// end.
    pub no_root: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Training {
    pub model: TrainedModel,
    pub fits: Vec<ClassFit>,
}

pub(crate) fn gather(field: &CovarianceField, pixels: &[Pixel]) -> Vec<HermitianMatrix3> {
    pixels.iter().map(|&(x, y)| *field.get(x, y)).collect()
}

/// Fits `(Σ_m, L̃_m)` to every class and fixes the shared number of looks.
///
/// The shared value is `shared_looks` when given, otherwise the
/// sample-size-weighted mean of the corrected per-class estimates. Weights
/// start uniform.
pub fn train(
    field: &CovarianceField,
    train_pixels: &[Vec<Pixel>],
    shared_looks: Option<f64>,
    looks_mode: LooksMode,
) -> Result<Training> {
    let m = train_pixels.len();
    let mut classes = Vec::with_capacity(m);
    let mut fits = Vec::with_capacity(m);
    for (i, pixels) in train_pixels.iter().enumerate() {
        if pixels.is_empty() {
            return Err(Error::EmptyClass { class: i + 1 });
        }
        let class_err = |source| Error::Class { class: i + 1, source };
        let stats = SampleStats::from_sample(&gather(field, pixels)).map_err(class_err)?;
        let (ml, no_root) = match estimate_looks_ml(&stats) {
            Ok(l) => (l, false),
            Err(polclass_core::Error::NoRoot { clamp }) => (clamp, true),
            Err(e) => return Err(class_err(e)),
        };
        let looks = correct_looks(ml, stats.n).map_err(class_err)?;
        classes.push(ClassModel { sigma: stats.mean, looks: looks.corrected, weight: 1.0 / m as f64 });
        fits.push(ClassFit { samples: stats.n, looks, no_root });
    }
    let shared_looks = match shared_looks {
        Some(l) => l,
        None => {
            let total: usize = fits.iter().map(|f| f.samples).sum();
            fits.iter().map(|f| f.looks.corrected * f.samples as f64).sum::<f64>() / total as f64
        }
    };
    let model = TrainedModel { classes, shared_looks, looks_mode };
    // Validates looks and positive definiteness once here.
    model.prototypes()?;
    Ok(Training { model, fits })
}

/// Optimizes the class weights of `model` on the training pixels with the
/// Kullback–Leibler distance at the shared number of looks.
pub fn fit_weights(
    field: &CovarianceField,
    train_pixels: &[Vec<Pixel>],
    model: &TrainedModel,
    config: &OptimizerConfig,
) -> Result<OptimizedWeights> {
    let classes = model
        .classes
        .iter()
        .zip(train_pixels)
        .map(|(c, pixels)| TrainingClass { prototype: c.sigma, samples: gather(field, pixels) })
        .collect();
    let set = TrainingSet::new(classes)?;
    Ok(optimize_weights(&set, DistanceKind::KullbackLeibler, model.shared_looks, config)?)
}
