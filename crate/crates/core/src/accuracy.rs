//! Per-class accuracy on held-out pixels and improvement over the worst
//! method.
//!
//! The improvement of a method with accuracy `a` over a baseline `b` (the
//! worst accuracy any compared method reached on that class) is the share of
//! the baseline's error that the method removes: `100·(a − b)/(100 − b)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::classify::ClassMap;
use crate::error::{Error, Result};

/// Accuracy in percent for each class, from per-class lists of test pixel
/// coordinates. Classes without test pixels report `NaN`.
pub fn per_class_accuracy(labels: &ClassMap, test: &[Vec<(usize, usize)>]) -> Result<Vec<f64>> {
    test.iter()
        .enumerate()
        .map(|(m, pixels)| {
            let mut correct = 0usize;
            for &(x, y) in pixels {
                if x >= labels.width() || y >= labels.height() {
                    return Err(Error::DimensionMismatch {
                        expected: labels.width() * labels.height(),
                        found: y * labels.width() + x,
                    });
                }
                if *labels.get(x, y) as usize == m + 1 {
                    correct += 1;
                }
            }
            Ok(if pixels.is_empty() { f64::NAN } else { 100.0 * correct as f64 / pixels.len() as f64 })
        })
        .collect()
}

/// Pooled accuracy over all test pixels, in percent.
pub fn overall_accuracy(labels: &ClassMap, test: &[Vec<(usize, usize)>]) -> Result<f64> {
    let per_class = per_class_accuracy(labels, test)?;
    let total: usize = test.iter().map(Vec::len).sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let correct: f64 =
        per_class.iter().zip(test).filter(|(_, p)| !p.is_empty()).map(|(a, p)| a * p.len() as f64 / 100.0).sum();
    Ok(100.0 * correct / total as f64)
}

/// `100·(acc − baseline)/(100 − baseline)`; `None` when the baseline is
/// already perfect.
pub fn improvement(accuracy: f64, baseline: f64) -> Option<f64> {
    if baseline >= 100.0 {
        None
    } else {
        Some(100.0 * (accuracy - baseline) / (100.0 - baseline))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: String,
    pub accuracy: Vec<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Improvement {
    /// This method is the worst on the class.
    Baseline,
    Percent(f64),
    /// Every method is perfect on the class.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub method: String,
    pub accuracy: Vec<f64>,
    pub improvement: Vec<Improvement>,
    pub seconds: f64,
}

/// Accuracies and improvements for a set of methods evaluated on the same
/// test pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub baseline: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn new(results: Vec<MethodResult>) -> Result<Self> {
        if results.len() < 2 {
            return Err(Error::DomainError("improvements need at least two runs for a baseline"));
        }
        let classes = results[0].accuracy.len();
        if let Some(bad) = results.iter().find(|r| r.accuracy.len() != classes) {
            return Err(Error::DimensionMismatch { expected: classes, found: bad.accuracy.len() });
        }
        let baseline: Vec<f64> =
            (0..classes).map(|m| results.iter().map(|r| r.accuracy[m]).fold(f64::INFINITY, f64::min)).collect();
        let rows = results
            .into_iter()
            .map(|r| {
                let improvement = r
                    .accuracy
                    .iter()
                    .zip(&baseline)
                    .map(|(&a, &b)| match improvement(a, b) {
                        None => Improvement::NotApplicable,
                        Some(_) if a == b => Improvement::Baseline,
                        Some(p) => Improvement::Percent(p),
                    })
                    .collect();
                ComparisonRow { method: r.method, accuracy: r.accuracy, improvement, seconds: r.seconds }
            })
            .collect();
        Ok(Self { baseline, rows })
    }
}
