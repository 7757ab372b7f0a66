//! Eye-makeup residue toolkit.
//!
//! - [`imaging`]: RGB rasters, HSV/luma conversion, resize and paste.
//! - [`landmarks`] and [`localization`]: face-mesh providers and the
//!   two-pass eye localization with open/closed classification.
//! - [`residue`]: paint segmentation, HSV-UV and binary-threshold
//!   renderings, residue ratios, and the removal check.
//! - [`eval`]: illumination distance, polygon overlap rates, ratio
//!   statistics and corpus evaluation.
//! - [`store`]: wear sessions, captures and the wearing-time trend.

pub mod colormap;
pub mod config;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod imaging;
pub mod landmarks;
pub mod localization;
pub mod residue;
pub mod store;
pub mod synthetic;

pub use config::Config;
pub use error::{Error, Result, Stage};
pub use geometry::{BinaryMask, Point, Rect};
pub use imaging::RasterImage;
