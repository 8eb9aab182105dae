//! Experiment configuration in plain `key: value` lines.
//!
//! ```text
//! # image and ROI files; without `image` the phantom is simulated and its
//! # ROIs are the largest interior square of each class
//! image: scene.hdr
//! roi: scene.roi
//! out: results
//! seed: 1
//! alpha: 0.5
//! dt: 0.01
//! iterations: 50
//! lambda: 1
//! looks: 4            # or `estimate`
//! looks_mode: shared  # or `per_class`
//! phantom.width: 150
//! phantom.height: 150
//! phantom.looks: 4
//! phantom.seed: 1
//! phantom.class.2.sigma: 0.18 0.11 0.16 0 0 0.04 0.01 0 0
//! phantom.class.2.region: band 0.6 0.85 -0.1
//! ```
//!
//! Phantom keys override the built-in three-class layout; classes beyond
//! the defaults need both a sigma and a region.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use polclass_core::classify::LooksMode;
use polclass_core::diffusion::EvolutionParams;
use polclass_core::phantom::{PhantomClass, PhantomSpec, Region};
use polclass_core::weights::OptimizerConfig;
use polclass_core::HermitianMatrix3;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub image: Option<PathBuf>,
    pub roi: Option<PathBuf>,
    pub out: PathBuf,
    /// Seed of the train/test split.
    pub seed: u64,
    pub evolution: EvolutionParams,
    pub optimizer: OptimizerConfig,
    /// Shared number of looks; `None` estimates it from the training data
    /// unless the image header or phantom provides one.
    pub looks: Option<f64>,
    pub looks_mode: LooksMode,
    pub phantom: PhantomSpec,
    /// Margin in pixels between phantom ROIs and class boundaries.
    pub roi_margin: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            image: None,
            roi: None,
            out: PathBuf::from("results"),
            seed: 1,
            evolution: EvolutionParams::default(),
            optimizer: OptimizerConfig::default(),
            looks: None,
            looks_mode: LooksMode::Shared,
            phantom: PhantomSpec::default_with_size(150, 150, 1),
            roi_margin: 2,
        }
    }
}

/// Parsed `key: value` lines remembering where each key came from.
struct Entries<'a> {
    path: &'a Path,
    map: BTreeMap<String, (usize, String)>,
}

impl<'a> Entries<'a> {
    fn parse(text: &str, path: &'a Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Config { path: path.to_owned(), line: i + 1, reason };
            let (k, v) = line.split_once(':').ok_or_else(|| err(format!("expected `key: value`, got `{line}`")))?;
            if map.insert(k.trim().to_owned(), (i + 1, v.trim().to_owned())).is_some() {
                return Err(err(format!("duplicate key `{}`", k.trim())));
            }
        }
        Ok(Self { path, map })
    }

    fn err(&self, line: usize, reason: String) -> Error {
        Error::Config { path: self.path.to_owned(), line, reason }
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => {
                v.parse().map(Some).map_err(|_| self.err(line, format!("invalid value `{v}` for `{key}`")))
            }
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => {
                Err(Error::Config { path: self.path.to_owned(), line, reason: format!("unknown key `{key}`") })
            }
        }
    }
}

fn parse_reals(text: &str) -> Option<Vec<f64>> {
    text.split_whitespace().map(|t| t.parse().ok()).collect()
}

fn parse_region(text: &str) -> Option<Region> {
    let mut parts = text.split_whitespace();
    let kind = parts.next()?;
    let v: Vec<f64> = parts.map(|t| t.parse().ok()).collect::<Option<_>>()?;
    match (kind, v.as_slice()) {
        ("background", []) => Some(Region::Background),
        ("disk", &[cx, cy, r]) => Some(Region::Disk { cx, cy, r }),
        ("band", &[v0, v1, slope]) => Some(Region::Band { v0, v1, slope }),
        ("rect", &[u0, v0, u1, v1]) => Some(Region::Rect { u0, v0, u1, v1 }),
        _ => None,
    }
}

fn apply_phantom(entries: &mut Entries, spec: &mut PhantomSpec) -> Result<()> {
    if let Some(w) = entries.parsed("phantom.width")? {
        spec.width = w;
    }
    if let Some(h) = entries.parsed("phantom.height")? {
        spec.height = h;
    }
    if let Some(l) = entries.parsed("phantom.looks")? {
        spec.looks = l;
    }
    if let Some(s) = entries.parsed("phantom.seed")? {
        spec.seed = s;
    }
    let mut k = 1;
    loop {
        let sigma = entries.take(&format!("phantom.class.{k}.sigma"));
        let region = entries.take(&format!("phantom.class.{k}.region"));
        if sigma.is_none() && region.is_none() && k > spec.classes.len() {
            break;
        }
        if k > spec.classes.len() {
            let line = sigma.as_ref().or(region.as_ref()).map_or(0, |e| e.0);
            if sigma.is_none() || region.is_none() {
                return Err(entries.err(line, format!("new phantom class {k} needs both sigma and region")));
            }
            spec.classes.push(PhantomClass { sigma: HermitianMatrix3::identity(), region: Region::Background });
        }
        if let Some((line, v)) = sigma {
            let arr: [f64; 9] = parse_reals(&v)
                .and_then(|v| v.try_into().ok())
                .ok_or_else(|| entries.err(line, format!("phantom class {k} sigma needs 9 numbers")))?;
            spec.classes[k - 1].sigma = HermitianMatrix3::from_array9(arr);
        }
        if let Some((line, v)) = region {
            spec.classes[k - 1].region =
                parse_region(&v).ok_or_else(|| entries.err(line, format!("bad region `{v}`")))?;
        }
        k += 1;
    }
    if let Some((line, v)) = entries.take("phantom.classes") {
        let n: usize = v.parse().map_err(|_| entries.err(line, format!("bad class count `{v}`")))?;
        if n > spec.classes.len() {
            return Err(entries.err(line, format!("{n} classes requested but only {} defined", spec.classes.len())));
        }
        spec.classes.truncate(n);
    }
    Ok(())
}

/// Phantom settings from a config file, starting from the default layout.
pub fn parse_phantom(text: &str, path: &Path) -> Result<PhantomSpec> {
    let mut entries = Entries::parse(text, path)?;
    let mut spec = PhantomSpec::default_with_size(150, 150, 1);
    apply_phantom(&mut entries, &mut spec)?;
    entries.finish()?;
    spec.validate()?;
    Ok(spec)
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut c = Self::default();
        let mut e = Entries::parse(text, path)?;
        c.image = e.take("image").map(|(_, v)| PathBuf::from(v));
        c.roi = e.take("roi").map(|(_, v)| PathBuf::from(v));
        if let Some((_, v)) = e.take("out") {
            c.out = PathBuf::from(v);
        }
        if let Some(s) = e.parsed("seed")? {
            c.seed = s;
        }
        if let Some(a) = e.parsed("alpha")? {
            c.evolution.alpha = a;
        }
        if let Some(dt) = e.parsed("dt")? {
            c.evolution.dt = dt;
        }
        if let Some(n) = e.parsed("iterations")? {
            c.evolution.iterations = n;
        }
        if let Some(l) = e.parsed("lambda")? {
            c.optimizer.lambda = l;
        }
        if let Some(m) = e.parsed("roi_margin")? {
            c.roi_margin = m;
        }
        if let Some((line, v)) = e.take("looks") {
            c.looks = match v.as_str() {
                "estimate" => None,
                v => Some(v.parse().map_err(|_| e.err(line, format!("invalid looks `{v}`")))?),
            };
        }
        if let Some((line, v)) = e.take("looks_mode") {
            c.looks_mode = match v.as_str() {
                "shared" => LooksMode::Shared,
                "per_class" => LooksMode::PerClass,
                other => return Err(e.err(line, format!("unknown looks mode `{other}`"))),
            };
        }
        apply_phantom(&mut e, &mut c.phantom)?;
        e.finish()?;
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        self.evolution.validate()?;
        if self.optimizer.lambda.is_nan() || self.optimizer.lambda <= 0.0 {
            return Err(polclass_core::Error::DomainError("lambda must be positive").into());
        }
        if self.image.is_none() {
            self.phantom.validate()?;
        }
        if self.image.is_some() && self.roi.is_none() {
            return Err(polclass_core::Error::InvalidSpec("an input image needs an ROI file".into()).into());
        }
        Ok(())
    }
}
