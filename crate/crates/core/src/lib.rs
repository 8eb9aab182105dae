//! Supervised classification of polarimetric SAR covariance images.
//!
//! Every pixel of a PolSAR image is a 3×3 Hermitian positive definite
//! covariance matrix that follows a scaled complex Wishart law. This crate
//! provides the numerical machinery to
//!
//! * evaluate and sample the Wishart law ([`wishart`]),
//! * fit `(Σ, L)` from training pixels with a bias-corrected number of looks
//!   ([`estimation`]),
//! * measure stochastic distances between Wishart laws ([`distance`]),
//! * learn per-class weights on the probability simplex ([`weights`]),
//! * classify pixels pointwise ([`classify`]),
//! * refine the image with an explicit diffusion-reaction evolution that
//!   never leaves the cone of positive definite matrices ([`diffusion`]),
//! * simulate labelled phantom images ([`phantom`]) and score results
//!   ([`accuracy`]).
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats and the command line live in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod accuracy;
pub mod classify;
pub mod diffusion;
pub mod distance;
mod error;
pub mod estimation;
pub mod grid;
pub mod hermitian;
mod math;
pub mod phantom;
pub mod special;
pub mod weights;
pub mod wishart;

pub use classify::{ClassMap, PrototypeSet, Rule};
pub use diffusion::{evolve, EvolutionMetrics, EvolutionParams};
pub use distance::DistanceKind;
pub use error::{Error, Result};
pub use grid::{CovarianceField, Grid};
pub use hermitian::{Complex, HermitianMatrix3};
pub use weights::{TrainingSet, WeightVector};
pub use wishart::WishartModel;
