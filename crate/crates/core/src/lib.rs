//! Normal variance-mean mixtures and their shape properties.
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the accuracy
//! targets in the docs refer to.

// `!(x > y)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod ghd;
pub mod gig;
pub mod gof;
pub mod linalg;
pub mod mixture;
pub mod quad;
pub mod real;
mod sampling;
pub mod shapecheck;
pub mod sichel;
pub mod specfun;
pub mod table;

pub use error::{Error, Result};
pub use ghd::{GhFamily, GhParams};
pub use gig::{GigParams, ShapeClass};
pub use mixture::{MixingDensity, MvMixtureSpec};
pub use real::Real;
pub use shapecheck::GridFunction;
pub use sichel::GigPParams;
pub use table::TableDensity;

pub type GigParams64 = GigParams<f64>;
pub type GhParams64 = GhParams<f64>;
pub type GigPParams64 = GigPParams<f64>;
pub type MixingDensity64 = MixingDensity<f64>;
pub type MvMixtureSpec64 = MvMixtureSpec<f64>;
pub type TableDensity64 = TableDensity<f64>;
pub type GridFunction64 = GridFunction<f64>;
pub type SquareMatrix64 = linalg::SquareMatrix<f64>;
pub type ShapeClass64 = ShapeClass<f64>;

pub type GigParams32 = GigParams<f32>;
pub type GhParams32 = GhParams<f32>;
