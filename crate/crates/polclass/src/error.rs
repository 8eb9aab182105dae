use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed header: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },
    #[error("{path}: expected {expected} bytes of data, found {found}")]
    SizeMismatch { path: PathBuf, expected: u64, found: u64 },
    #[error("{path}:{line}: malformed ROI line: {reason}")]
    MalformedRoi { path: PathBuf, line: usize, reason: String },
    #[error("ROI rectangle {rect:?} of class {class} lies outside the {width}x{height} image")]
    OutOfBounds { class: usize, rect: [usize; 4], width: usize, height: usize },
    #[error("ROI class {class} has no pixels")]
    EmptyClass { class: usize },
    #[error("{path}:{line}: malformed model file: {reason}")]
    MalformedModel { path: PathBuf, line: usize, reason: String },
    #[error("{path}:{line}: {reason}")]
    Config { path: PathBuf, line: usize, reason: String },
    #[error("improvements need at least two runs to define a baseline")]
    MissingBaseline,
    #[error("class {class}: {source}")]
    Class {
        class: usize,
        #[source]
        source: polclass_core::Error,
    },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Core(#[from] polclass_core::Error),
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

/// Tags errors with the pipeline stage that produced them.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T, E: Into<Error>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage { stage, source: Box::new(e.into()) })
    }
}
