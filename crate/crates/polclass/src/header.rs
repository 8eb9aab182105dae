//! Plain-text `key: value` headers that sit next to raw little-endian data
//! files. `image.hdr` describes `image.bin`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    U8,
    F32,
    F64,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dtype::U8 => "u8",
            Dtype::F32 => "f32",
            Dtype::F64 => "f64",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub width: usize,
    pub height: usize,
    pub dtype: Dtype,
    pub looks: Option<f64>,
}

/// Data file belonging to a header: same path with the `.bin` extension.
pub fn data_path(header: &Path) -> PathBuf {
    header.with_extension("bin")
}

/// Header path for an output prefix or path: forces the `.hdr` extension.
pub fn header_path(path: &Path) -> PathBuf {
    path.with_extension("hdr")
}

impl Header {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::MalformedHeader { path: path.to_owned(), reason };
        let mut fields = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once(':').ok_or_else(|| bad(format!("expected `key: value`, got `{line}`")))?;
            if fields.insert(key.trim().to_owned(), value.trim().to_owned()).is_some() {
                return Err(bad(format!("duplicate key `{}`", key.trim())));
            }
        }
        fn field<T: FromStr>(
            fields: &BTreeMap<String, String>,
            key: &str,
            bad: &dyn Fn(String) -> Error,
        ) -> Result<Option<T>> {
            fields.get(key).map(|v| v.parse().map_err(|_| bad(format!("invalid value `{v}` for `{key}`")))).transpose()
        }
        let width: usize = field(&fields, "width", &bad)?.ok_or_else(|| bad("missing `width`".into()))?;
        let height: usize = field(&fields, "height", &bad)?.ok_or_else(|| bad("missing `height`".into()))?;
        let dtype = match fields.get("dtype").map(String::as_str) {
            Some("u8") => Dtype::U8,
            Some("f32") => Dtype::F32,
            Some("f64") => Dtype::F64,
            Some(other) => return Err(bad(format!("unsupported dtype `{other}`"))),
            None => return Err(bad("missing `dtype`".into())),
        };
        match fields.get("byte_order").map(String::as_str) {
            Some("little") => {}
            Some(other) => return Err(bad(format!("unsupported byte order `{other}`"))),
            None => return Err(bad("missing `byte_order`".into())),
        }
        let looks = field(&fields, "looks", &bad)?;
        for key in fields.keys() {
            if !matches!(key.as_str(), "width" | "height" | "dtype" | "byte_order" | "looks") {
                return Err(bad(format!("unknown key `{key}`")));
            }
        }
        Ok(Self { width, height, dtype, looks })
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "width: {}\nheight: {}\ndtype: {}\nbyte_order: little\n",
            self.width,
            self.height,
            self.dtype.name()
        );
        if let Some(l) = self.looks {
            let _ = writeln!(s, "looks: {l}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(Error::io(path))
    }

    /// Reads the data file and checks its length against the header.
    pub(crate) fn read_data(&self, path: &Path, values_per_pixel: usize) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(Error::io(path))?;
        let expected = (self.width * self.height * values_per_pixel * self.dtype.size()) as u64;
        if bytes.len() as u64 != expected {
            return Err(Error::SizeMismatch { path: path.to_owned(), expected, found: bytes.len() as u64 });
        }
        Ok(bytes)
    }
}
