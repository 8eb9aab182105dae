//! Covariance images and class maps on disk.
//!
//! A covariance pixel is stored as nine little-endian reals in the order
//! `C11, C22, C33, Re C12, Im C12, Re C13, Im C13, Re C23, Im C23`, pixels
//! in row-major order. Class maps use one byte per pixel.

use std::path::Path;

use polclass_core::classify::ClassMap;
use polclass_core::{CovarianceField, Grid, HermitianMatrix3};

use crate::error::{Error, Result};
use crate::header::{data_path, Dtype, Header};

/// A covariance image with its header metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceImage {
    pub field: CovarianceField,
    pub looks: Option<f64>,
    /// Row-major indices of pixels that are not positive definite. They are
    /// kept in the field; classifiers label them as unclassified.
    pub non_positive_definite: Vec<usize>,
}

/// Reads `header` and the `.bin` file next to it.
pub fn read_covariance_image(header: &Path) -> Result<CovarianceImage> {
    read_covariance_image_from(header, &data_path(header))
}

pub fn read_covariance_image_from(header_path: &Path, data: &Path) -> Result<CovarianceImage> {
    let header = Header::read(header_path)?;
    if header.dtype == Dtype::U8 {
        return Err(Error::MalformedHeader {
            path: header_path.to_owned(),
            reason: "covariance images need dtype f32 or f64".into(),
        });
    }
    let bytes = header.read_data(data, 9)?;
    let values: Vec<f64> = match header.dtype {
        Dtype::F64 => bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect(),
        Dtype::F32 => bytes.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64).collect(),
        Dtype::U8 => unreachable!("rejected above"),
    };
    let pixels = values.chunks_exact(9).map(|v| HermitianMatrix3::from_array9(v.try_into().unwrap())).collect();
    let field = Grid::from_vec(header.width, header.height, pixels)?;
    let non_positive_definite = field.non_positive_definite();
    Ok(CovarianceImage { field, looks: header.looks, non_positive_definite })
}

/// Writes `header` (forced to `.hdr`) and its `.bin` data file.
pub fn write_covariance_image(field: &CovarianceField, looks: Option<f64>, dtype: Dtype, header: &Path) -> Result<()> {
    if dtype == Dtype::U8 {
        return Err(Error::MalformedHeader {
            path: header.to_owned(),
            reason: "covariance images need dtype f32 or f64".into(),
        });
    }
    let mut bytes = Vec::with_capacity(field.len() * 9 * dtype.size());
    for z in field.as_slice() {
        for v in z.to_array9() {
            match dtype {
                Dtype::F64 => bytes.extend_from_slice(&v.to_le_bytes()),
                _ => bytes.extend_from_slice(&(v as f32).to_le_bytes()),
            }
        }
    }
    Header { width: field.width(), height: field.height(), dtype, looks }.write(header)?;
    let data = data_path(header);
    std::fs::write(&data, bytes).map_err(Error::io(&data))
}

pub fn read_classmap(header: &Path) -> Result<ClassMap> {
    let h = Header::read(header)?;
    if h.dtype != Dtype::U8 {
        return Err(Error::MalformedHeader { path: header.to_owned(), reason: "class maps need dtype u8".into() });
    }
    let bytes = h.read_data(&data_path(header), 1)?;
    Ok(Grid::from_vec(h.width, h.height, bytes)?)
}

pub fn write_classmap(map: &ClassMap, header: &Path) -> Result<()> {
    Header { width: map.width(), height: map.height(), dtype: Dtype::U8, looks: None }.write(header)?;
    let data = data_path(header);
    std::fs::write(&data, map.as_slice()).map_err(Error::io(&data))
}
