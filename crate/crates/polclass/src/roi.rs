//! Labelled regions of interest and their random train/test split.
//!
//! ROI files hold one inclusive rectangle per line, `class x0 y0 x1 y1`,
//! with classes numbered from 1. Blank lines and `#` comments are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Pixel = (usize, usize);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoiSet {
    /// `classes[m]` holds the rectangles `[x0, y0, x1, y1]` of class `m + 1`.
    pub classes: Vec<Vec<[usize; 4]>>,
}

impl RoiSet {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn add(&mut self, class: usize, rect: [usize; 4]) {
        assert!(class >= 1, "classes are numbered from 1");
        if self.classes.len() < class {
            self.classes.resize(class, Vec::new());
        }
        self.classes[class - 1].push(rect);
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut roi = RoiSet::default();
        for (i, line) in text.lines().enumerate() {
            let bad = |reason: String| Error::MalformedRoi { path: path.to_owned(), line: i + 1, reason };
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(format!("`{t}` is not a non-negative integer"))))
                .collect::<Result<_>>()?;
            let [class, x0, y0, x1, y1] = fields[..] else {
                return Err(bad(format!("expected 5 fields, found {}", fields.len())));
            };
            if class == 0 || class > u8::MAX as usize {
                return Err(bad(format!("class {class} outside 1..=255")));
            }
            if x0 > x1 || y0 > y1 {
                return Err(bad("rectangle corners are not ordered".into()));
            }
            roi.add(class, [x0, y0, x1, y1]);
        }
        Ok(roi)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::parse(&text, path)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (m, rects) in self.classes.iter().enumerate() {
            for [x0, y0, x1, y1] in rects {
                let _ = writeln!(s, "{} {x0} {y0} {x1} {y1}", m + 1);
            }
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(Error::io(path))
    }

    pub fn check_bounds(&self, width: usize, height: usize) -> Result<()> {
        for (m, rects) in self.classes.iter().enumerate() {
            for rect in rects {
                if rect[2] >= width || rect[3] >= height {
                    return Err(Error::OutOfBounds { class: m + 1, rect: *rect, width, height });
                }
            }
        }
        Ok(())
    }

    /// Distinct pixels of each class in row-major order.
    pub fn pixels(&self) -> Vec<Vec<Pixel>> {
        self.classes
            .iter()
            .map(|rects| {
                let set: BTreeSet<(usize, usize)> = rects
                    .iter()
                    .flat_map(|&[x0, y0, x1, y1]| (y0..=y1).flat_map(move |y| (x0..=x1).map(move |x| (y, x))))
                    .collect();
                set.into_iter().map(|(y, x)| (x, y)).collect()
            })
            .collect()
    }
}

/// Disjoint halves of every class's ROI pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<Vec<Pixel>>,
    pub test: Vec<Vec<Pixel>>,
}

/// Simple random sampling without replacement of half of each class. Odd
/// counts give the extra pixel to the training half. Both halves come back
/// in row-major order.
///
/// The result depends only on the set of pixels and the seed, not on how
/// the rectangles were listed.
pub fn split_roi(roi: &RoiSet, seed: u64) -> Split {
    let mut train = Vec::with_capacity(roi.num_classes());
    let mut test = Vec::with_capacity(roi.num_classes());
    for (m, mut pixels) in roi.pixels().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(m as u64);
        pixels.shuffle(&mut rng);
        let mut te = pixels.split_off(pixels.len().div_ceil(2));
        let mut tr = pixels;
        tr.sort_by_key(|&(x, y)| (y, x));
        te.sort_by_key(|&(x, y)| (y, x));
        train.push(tr);
        test.push(te);
    }
    Split { train, test }
}
