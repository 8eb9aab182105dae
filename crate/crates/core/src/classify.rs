//! Pointwise classification rules.

use alloc::vec::Vec;

use crate::distance::{self, DistanceKind};
use crate::error::{Error, Result};
use crate::grid::{CovarianceField, Grid};
use crate::hermitian::HermitianMatrix3;
use crate::weights::WeightVector;
use crate::wishart::WishartModel;

/// Labels `1..=M`; `0` marks an unclassified pixel.
pub type ClassMap = Grid<u8>;

pub const UNCLASSIFIED: u8 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Maximum Wishart likelihood.
    MaximumLikelihood,
    Euclidean,
    Hellinger,
    KullbackLeibler,
    /// Kullback–Leibler scaled by the optimized class weights.
    WeightedKullbackLeibler,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::MaximumLikelihood,
        Rule::Euclidean,
        Rule::Hellinger,
        Rule::KullbackLeibler,
        Rule::WeightedKullbackLeibler,
    ];

    /// Short name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Rule::MaximumLikelihood => "ML",
            Rule::Euclidean => "ED",
            Rule::Hellinger => "HD",
            Rule::KullbackLeibler => "KL",
            Rule::WeightedKullbackLeibler => "KL+OW",
        }
    }
}

/// Which number of looks enters class distances and likelihoods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LooksMode {
    /// The experiment-wide `shared_looks` for every class.
    #[default]
    Shared,
    /// Each class uses the looks of its own model.
    PerClass,
}

/// Class prototypes `(Σ_m, L_m)` with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeSet {
    models: Vec<WishartModel>,
    weights: WeightVector,
    shared_looks: f64,
    looks_mode: LooksMode,
}

/// Nearest prototype under a (possibly weighted) distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    /// Zero-based class index.
    pub class: usize,
    pub distance: f64,
    /// Smallest distance among the other classes.
    pub runner_up: f64,
}

impl PrototypeSet {
    pub fn new(models: Vec<WishartModel>, weights: WeightVector, shared_looks: f64) -> Result<Self> {
        if models.len() < 2 {
            return Err(Error::InvalidWeights("at least two prototypes are required".into()));
        }
        if models.len() > u8::MAX as usize {
            return Err(Error::InvalidWeights("at most 255 classes are supported".into()));
        }
        if weights.len() != models.len() {
            return Err(Error::DimensionMismatch { expected: models.len(), found: weights.len() });
        }
        if !(shared_looks >= crate::wishart::MIN_LOOKS) {
            return Err(Error::InvalidLooks(shared_looks));
        }
        Ok(Self { models, weights, shared_looks, looks_mode: LooksMode::Shared })
    }

    /// Prototypes with uniform weights.
    pub fn unweighted(models: Vec<WishartModel>, shared_looks: f64) -> Result<Self> {
        let m = models.len();
        Self::new(models, WeightVector::uniform(m), shared_looks)
    }

    pub fn with_looks_mode(mut self, mode: LooksMode) -> Self {
        self.looks_mode = mode;
        self
    }

    pub fn with_weights(mut self, weights: WeightVector) -> Result<Self> {
        if weights.len() != self.models.len() {
            return Err(Error::DimensionMismatch { expected: self.models.len(), found: weights.len() });
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[WishartModel] {
        &self.models
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn shared_looks(&self) -> f64 {
        self.shared_looks
    }

    pub fn looks_mode(&self) -> LooksMode {
        self.looks_mode
    }

    pub fn sigma(&self, class: usize) -> &HermitianMatrix3 {
        self.models[class].sigma()
    }

    /// Looks used for class `class` under the current mode.
    pub fn looks_for(&self, class: usize) -> f64 {
        match self.looks_mode {
            LooksMode::Shared => self.shared_looks,
            LooksMode::PerClass => self.models[class].looks(),
        }
    }

    fn model_for(&self, class: usize) -> Result<WishartModel> {
        match self.looks_mode {
            LooksMode::PerClass => Ok(self.models[class]),
            LooksMode::Shared => self.models[class].with_looks(self.shared_looks),
        }
    }

    /// `d(x, Σ_m)`. `x_inv` must be the inverse of `x` when the kind is
    /// Kullback–Leibler.
    fn raw_distance(
        &self,
        x: &HermitianMatrix3,
        x_inv: Option<&HermitianMatrix3>,
        class: usize,
        kind: DistanceKind,
    ) -> Result<f64> {
        let model = &self.models[class];
        let l = self.looks_for(class);
        match (kind, x_inv) {
            (DistanceKind::KullbackLeibler, Some(inv)) => {
                distance::kl_distance_with_inverses(x, inv, model.sigma(), model.sigma_inv(), l)
            }
            _ => kind.eval(x, model.sigma(), l),
        }
    }

    /// `w_m·d(x, Σ_m)` (or the plain distance) for every class.
    pub fn distances(&self, x: &HermitianMatrix3, kind: DistanceKind, weighted: bool) -> Result<Vec<f64>> {
        let x_inv = match kind {
            DistanceKind::KullbackLeibler => Some(x.inverse()?),
            _ => None,
        };
        (0..self.len())
            .map(|m| {
                let d = self.raw_distance(x, x_inv.as_ref(), m, kind)?;
                Ok(if weighted { self.weights[m] * d } else { d })
            })
            .collect()
    }

    /// Argmin over classes with ties resolved to the lowest index, together
    /// with the best distance among the remaining classes.
    pub fn nearest(&self, x: &HermitianMatrix3, kind: DistanceKind, weighted: bool) -> Result<Nearest> {
        let x_inv = match kind {
            DistanceKind::KullbackLeibler => Some(x.inverse()?),
            _ => None,
        };
        let mut best = (0usize, f64::INFINITY);
        let mut second = f64::INFINITY;
        for m in 0..self.len() {
            let mut d = self.raw_distance(x, x_inv.as_ref(), m, kind)?;
            if weighted {
                d *= self.weights[m];
            }
            if d.is_nan() {
                return Err(Error::DomainError("distance evaluated to NaN"));
            }
            if d < best.1 {
                second = best.1;
                best = (m, d);
            } else if d < second {
                second = d;
            }
        }
        Ok(Nearest { class: best.0, distance: best.1, runner_up: second })
    }

    /// Zero-based class index chosen by `rule`.
    pub fn classify_pixel(&self, x: &HermitianMatrix3, rule: Rule) -> Result<usize> {
        match rule {
            Rule::MaximumLikelihood => {
                let mut best = (0usize, f64::NEG_INFINITY);
                for m in 0..self.len() {
                    let ll = self.model_for(m)?.log_density(x)?;
                    if ll > best.1 {
                        best = (m, ll);
                    }
                }
                Ok(best.0)
            }
            Rule::Euclidean => Ok(self.nearest(x, DistanceKind::Euclidean, false)?.class),
            // Bhattacharyya is an increasing transform of Hellinger with the
            // same argmin, and it does not saturate at 1 for remote pixels.
            Rule::Hellinger => Ok(self.nearest(x, DistanceKind::Bhattacharyya, false)?.class),
            Rule::KullbackLeibler => Ok(self.nearest(x, DistanceKind::KullbackLeibler, false)?.class),
            Rule::WeightedKullbackLeibler => Ok(self.nearest(x, DistanceKind::KullbackLeibler, true)?.class),
        }
    }
}

/// Labels produced by [`classify_image`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageClassification {
    pub labels: ClassMap,
    /// Row-major indices of pixels that could not be classified (label 0).
    pub failed: Vec<usize>,
}

pub fn classify_image(field: &CovarianceField, protos: &PrototypeSet, rule: Rule) -> ImageClassification {
    let mut failed = Vec::new();
    let labels = Grid::from_vec(
        field.width(),
        field.height(),
        field
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, x)| match protos.classify_pixel(x, rule) {
                Ok(m) => (m + 1) as u8,
                Err(_) => {
                    failed.push(i);
                    UNCLASSIFIED
                }
            })
            .collect(),
    )
    .expect("one label per pixel");
    ImageClassification { labels, failed }
}
