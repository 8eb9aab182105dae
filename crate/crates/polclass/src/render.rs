//! False-colour renders written as binary PPM (P6, 8 bits per channel).
//!
//! A covariance pixel gets `Σ_m c_m·colour_m`, with
//! `c_m ∝ 1/(d_E(Σ_ij, Σ_m) + ε)` normalized to sum to one. Class maps are
//! painted with flat class colours; the unclassified label is black.

use std::io::Write as _;
use std::path::Path;

use polclass_core::classify::{ClassMap, PrototypeSet, UNCLASSIFIED};
use polclass_core::distance::euclidean_distance;
use polclass_core::CovarianceField;

use crate::error::{Error, Result};

pub const EPSILON: f64 = 1e-12;

pub type Rgb = [u8; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB triples.
    pub pixels: Vec<Rgb>,
}

/// `n` fully saturated colours with hues spread evenly around the wheel,
/// starting at red.
pub fn palette(n: usize) -> Vec<Rgb> {
    (0..n)
        .map(|i| {
            let h = 6.0 * i as f64 / n as f64;
            let x = 1.0 - (h % 2.0 - 1.0).abs();
            let (r, g, b) = match h as u32 {
                0 => (1.0, x, 0.0),
                1 => (x, 1.0, 0.0),
                2 => (0.0, 1.0, x),
                3 => (0.0, x, 1.0),
                4 => (x, 0.0, 1.0),
                _ => (1.0, 0.0, x),
            };
            [to_byte(r * 255.0), to_byte(g * 255.0), to_byte(b * 255.0)]
        })
        .collect()
}

fn to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Colour of one pixel from its Euclidean distances to the prototypes.
pub fn blend(distances: &[f64], colours: &[Rgb]) -> Rgb {
    let weights: Vec<f64> = distances.iter().map(|d| 1.0 / (d + EPSILON)).collect();
    let total: f64 = weights.iter().sum();
    let mut rgb = [0.0; 3];
    for (w, c) in weights.iter().zip(colours) {
        for k in 0..3 {
            rgb[k] += w / total * c[k] as f64;
        }
    }
    rgb.map(to_byte)
}

pub fn render_field(field: &CovarianceField, protos: &PrototypeSet, colours: &[Rgb]) -> RgbImage {
    let pixels = field
        .as_slice()
        .iter()
        .map(|z| {
            let d: Vec<f64> = (0..protos.len()).map(|m| euclidean_distance(z, protos.sigma(m))).collect();
            blend(&d, colours)
        })
        .collect();
    RgbImage { width: field.width(), height: field.height(), pixels }
}

pub fn render_classmap(map: &ClassMap, colours: &[Rgb]) -> RgbImage {
    let pixels = map
        .as_slice()
        .iter()
        .map(|&l| match l {
            UNCLASSIFIED => [0, 0, 0],
            l => colours.get(l as usize - 1).copied().unwrap_or([255, 255, 255]),
        })
        .collect();
    RgbImage { width: map.width(), height: map.height(), pixels }
}

impl RgbImage {
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().flatten());
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path).map_err(Error::io(path))?;
        file.write_all(&self.to_ppm()).map_err(Error::io(path))
    }
}
