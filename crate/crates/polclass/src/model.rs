//! Trained class models and their plain-text file format.
//!
//! ```text
//! shared_looks: 4
//! looks_mode: shared
//! class: 1
//! sigma: C11 C22 C33 ReC12 ImC12 ReC13 ImC13 ReC23 ImC23
//! looks: 3.97
//! weight: 0.42
//! class: 2
//! ...
//! ```
//!
//! Reals are written in their shortest round-trip form, so files reload
//! bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use polclass_core::classify::{LooksMode, PrototypeSet};
use polclass_core::weights::WeightVector;
use polclass_core::{HermitianMatrix3, WishartModel};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassModel {
    pub sigma: HermitianMatrix3,
    /// Bias-corrected number of looks of this class.
    pub looks: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub classes: Vec<ClassModel>,
    pub shared_looks: f64,
    pub looks_mode: LooksMode,
}

impl TrainedModel {
    pub fn weights(&self) -> Result<WeightVector> {
        Ok(WeightVector::new(self.classes.iter().map(|c| c.weight).collect())?)
    }

    pub fn set_weights(&mut self, weights: &WeightVector) {
        for (c, w) in self.classes.iter_mut().zip(weights.as_slice()) {
            c.weight = *w;
        }
    }

    pub fn prototypes(&self) -> Result<PrototypeSet> {
        let models = self
            .classes
            .iter()
            .enumerate()
            .map(|(m, c)| WishartModel::new(c.sigma, c.looks).map_err(|source| Error::Class { class: m + 1, source }))
            .collect::<Result<Vec<_>>>()?;
        Ok(PrototypeSet::new(models, self.weights()?, self.shared_looks)?.with_looks_mode(self.looks_mode))
    }

    pub fn render(&self) -> String {
        let mode = match self.looks_mode {
            LooksMode::Shared => "shared",
            LooksMode::PerClass => "per_class",
        };
        let mut s = format!("shared_looks: {}\nlooks_mode: {mode}\n", self.shared_looks);
        for (m, c) in self.classes.iter().enumerate() {
            let sigma: Vec<String> = c.sigma.to_array9().iter().map(f64::to_string).collect();
            let _ =
                write!(s, "class: {}\nsigma: {}\nlooks: {}\nweight: {}\n", m + 1, sigma.join(" "), c.looks, c.weight);
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut shared_looks = None;
        let mut looks_mode = LooksMode::Shared;
        let mut classes: Vec<(Option<HermitianMatrix3>, Option<f64>, Option<f64>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let bad = |reason: String| Error::MalformedModel { path: path.to_owned(), line: i + 1, reason };
            let real = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("`{v}` is not a number")));
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| bad("expected `key: value`".into()))?;
            let value = value.trim();
            let current = classes.last_mut();
            match (key.trim(), current) {
                ("shared_looks", _) => shared_looks = Some(real(value)?),
                ("looks_mode", _) => {
                    looks_mode = match value {
                        "shared" => LooksMode::Shared,
                        "per_class" => LooksMode::PerClass,
                        other => return Err(bad(format!("unknown looks mode `{other}`"))),
                    }
                }
                ("class", _) => {
                    let n: usize = value.parse().map_err(|_| bad(format!("bad class number `{value}`")))?;
                    if n != classes.len() + 1 {
                        return Err(bad(format!("expected class {}, found {n}", classes.len() + 1)));
                    }
                    classes.push((None, None, None));
                }
                ("sigma", Some(c)) => {
                    let v: Vec<f64> = value.split_whitespace().map(real).collect::<Result<_>>()?;
                    let arr: [f64; 9] = v.try_into().map_err(|_| bad("sigma needs 9 values".into()))?;
                    c.0 = Some(HermitianMatrix3::from_array9(arr));
                }
                ("looks", Some(c)) => c.1 = Some(real(value)?),
                ("weight", Some(c)) => c.2 = Some(real(value)?),
                (k, None) if matches!(k, "sigma" | "looks" | "weight") => {
                    return Err(bad(format!("`{k}` before the first `class:`")))
                }
                (k, _) => return Err(bad(format!("unknown key `{k}`"))),
            }
        }
        let incomplete = |reason: String| Error::MalformedModel { path: path.to_owned(), line: 0, reason };
        let classes = classes
            .into_iter()
            .enumerate()
            .map(|(m, c)| match c {
                (Some(sigma), Some(looks), Some(weight)) => Ok(ClassModel { sigma, looks, weight }),
                _ => Err(incomplete(format!("class {} needs sigma, looks and weight", m + 1))),
            })
            .collect::<Result<Vec<_>>>()?;
        if classes.len() < 2 {
            return Err(incomplete("a model needs at least two classes".into()));
        }
        let shared_looks = shared_looks.ok_or_else(|| incomplete("missing `shared_looks`".into()))?;
        Ok(Self { classes, shared_looks, looks_mode })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(Error::io(path))
    }
}
