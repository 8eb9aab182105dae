//! Simulated multi-class Wishart phantom with known ground truth.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::ClassMap;
use crate::error::{Error, Result};
use crate::grid::{CovarianceField, Grid};
use crate::hermitian::{Complex, HermitianMatrix3};
use crate::wishart::WishartModel;

/// Shape of a class region in normalized image coordinates `u = x/width`,
/// `v = y/height`, measured at pixel centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// Everything not covered by a later region.
    Background,
    /// Disk with centre `(cx, cy)` and radius `r` as a fraction of
    /// `min(width, height)`.
    Disk {
        cx: f64,
        cy: f64,
        r: f64,
    },
    /// Straight band `v0 + slope·u ≤ v ≤ v1 + slope·u`.
    Band {
        v0: f64,
        v1: f64,
        slope: f64,
    },
    Rect {
        u0: f64,
        v0: f64,
        u1: f64,
        v1: f64,
    },
}

impl Region {
    pub fn contains(&self, x: usize, y: usize, width: usize, height: usize) -> bool {
        let u = (x as f64 + 0.5) / width as f64;
        let v = (y as f64 + 0.5) / height as f64;
        match *self {
            Region::Background => true,
            Region::Disk { cx, cy, r } => {
                let scale = width.min(height) as f64;
                let dx = (u - cx) * width as f64 / scale;
                let dy = (v - cy) * height as f64 / scale;
                dx * dx + dy * dy <= r * r
            }
            Region::Band { v0, v1, slope } => v >= v0 + slope * u && v <= v1 + slope * u,
            Region::Rect { u0, v0, u1, v1 } => u >= u0 && u <= u1 && v >= v0 && v <= v1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhantomClass {
    pub sigma: HermitianMatrix3,
    pub region: Region,
}

/// Phantom layout and generator settings.
///
/// Regions are painted in order, so later classes cover earlier ones. The
/// first class must be the [`Region::Background`], which makes the regions a
/// partition of the image.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    pub looks: u32,
    pub seed: u64,
    pub classes: Vec<PhantomClass>,
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Built-in class covariances: a dark, strongly co-polarized surface, a
/// volume scatterer with high cross-polarized power, and a bright
/// double-bounce class with strong co-polar correlation.
pub fn default_prototypes() -> [HermitianMatrix3; 3] {
    [
        HermitianMatrix3::new([0.030, 0.004, 0.020], c(0.0, 0.0), c(0.016, 0.004), c(0.0, 0.0)),
        HermitianMatrix3::new([0.180, 0.110, 0.160], c(0.0, 0.0), c(0.040, 0.010), c(0.0, 0.0)),
        HermitianMatrix3::new([0.900, 0.050, 0.700], c(0.0, 0.0), c(0.600, -0.200), c(0.0, 0.0)),
    ]
}

/// Background, slanted band and disk.
pub fn default_regions() -> [Region; 3] {
    [
        Region::Background,
        Region::Band { v0: 0.60, v1: 0.85, slope: -0.10 },
        Region::Disk { cx: 0.68, cy: 0.30, r: 0.20 },
    ]
}

impl PhantomSpec {
    /// The default three-class layout at the given size.
    pub fn default_with_size(width: usize, height: usize, seed: u64) -> Self {
        let classes = default_prototypes()
            .iter()
            .zip(default_regions())
            .map(|(sigma, region)| PhantomClass { sigma: *sigma, region })
            .collect();
        Self { width, height, looks: 4, seed, classes }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidSpec("image must have at least one pixel".into()));
        }
        if self.looks < 3 {
            return Err(Error::InvalidSpec(format!("looks must be at least 3, got {}", self.looks)));
        }
        if self.classes.is_empty() || self.classes.len() > u8::MAX as usize {
            return Err(Error::InvalidSpec("need between 1 and 255 classes".into()));
        }
        if self.classes[0].region != Region::Background {
            return Err(Error::InvalidSpec("the first class must be the background".into()));
        }
        for (m, class) in self.classes.iter().enumerate() {
            if !class.sigma.is_positive_definite() {
                return Err(Error::InvalidSpec(format!("class {} covariance is not positive definite", m + 1)));
            }
        }
        Ok(())
    }

    /// Ground-truth labels (`1..=M`).
    pub fn ground_truth(&self) -> Result<ClassMap> {
        self.validate()?;
        let map = Grid::from_fn(self.width, self.height, |x, y| {
            let mut label = 1u8;
            for (m, class) in self.classes.iter().enumerate().skip(1) {
                if class.region.contains(x, y, self.width, self.height) {
                    label = (m + 1) as u8;
                }
            }
            label
        });
        let mut counts = vec![0usize; self.classes.len()];
        for &l in map.as_slice() {
            counts[l as usize - 1] += 1;
        }
        if let Some(m) = counts.iter().position(|&n| n == 0) {
            return Err(Error::InvalidSpec(format!("class {} covers no pixel", m + 1)));
        }
        Ok(map)
    }

    /// Largest square of each class whose pixels are all at Chebyshev
    /// distance greater than `margin` from any other class, as inclusive
    /// `(x0, y0, x1, y1)` rectangles indexed by class.
    pub fn interior_squares(&self, margin: usize) -> Result<Vec<Option<[usize; 4]>>> {
        let truth = self.ground_truth()?;
        Ok(interior_squares(&truth, self.classes.len(), margin))
    }
}

/// Per-class largest interior square of a label map. See
/// [`PhantomSpec::interior_squares`].
pub fn interior_squares(labels: &ClassMap, classes: usize, margin: usize) -> Vec<Option<[usize; 4]>> {
    let (w, h) = (labels.width(), labels.height());
    let interior = Grid::from_fn(w, h, |x, y| {
        let l = *labels.get(x, y);
        let (x0, x1) = (x.saturating_sub(margin), (x + margin).min(w - 1));
        let (y0, y1) = (y.saturating_sub(margin), (y + margin).min(h - 1));
        if x < margin || y < margin || x + margin >= w || y + margin >= h {
            return 0;
        }
        for yy in y0..=y1 {
            for xx in x0..=x1 {
                if *labels.get(xx, yy) != l {
                    return 0;
                }
            }
        }
        l
    });
    (1..=classes)
        .map(|label| {
            // Maximal square DP: side[x, y] = largest square ending at (x, y).
            let mut side = vec![0usize; w * h];
            let mut best: Option<(usize, usize, usize)> = None;
            for y in 0..h {
                for x in 0..w {
                    if *interior.get(x, y) as usize != label {
                        continue;
                    }
                    let s = if x == 0 || y == 0 {
                        1
                    } else {
                        1 + side[(y - 1) * w + x].min(side[y * w + x - 1]).min(side[(y - 1) * w + x - 1])
                    };
                    side[y * w + x] = s;
                    if best.is_none_or(|b| s > b.2) {
                        best = Some((x, y, s));
                    }
                }
            }
            best.map(|(x, y, s)| [x + 1 - s, y + 1 - s, x, y])
        })
        .collect()
}

/// Draws every pixel independently from the Wishart law of its class.
///
/// Row `y` uses its own ChaCha stream derived from `(seed, y)`, so results do
/// not depend on how rows are scheduled.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<(CovarianceField, ClassMap)> {
    let truth = spec.ground_truth()?;
    let models =
        spec.classes.iter().map(|c| WishartModel::new(c.sigma, spec.looks as f64)).collect::<Result<Vec<_>>>()?;
    let mut pixels = Vec::with_capacity(spec.width * spec.height);
    for (y, row) in truth.rows().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(y as u64);
        for &label in row {
            pixels.push(models[label as usize - 1].sample(&mut rng)?);
        }
    }
    Ok((Grid::from_vec(spec.width, spec.height, pixels)?, truth))
}
