//! File formats, experiment pipeline and command-line plumbing around
//! [`polclass_core`].

pub mod config;
mod error;
pub mod header;
pub mod image;
pub mod model;
pub mod pipeline;
pub mod render;
pub mod roi;
pub mod tables;
pub mod train;

pub use error::{Error, Result};
pub use polclass_core as core;
