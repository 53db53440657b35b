//! Quantile-regression modeling with uncertainty-aware raster mapping.
//!
//! The crate covers the full workflow for predicting a response surface
//! from mixed continuous/categorical covariates:
//!
//! - [`qr`]: the pinball loss, an interior-point LP solver for quantile
//!   fits across a grid of levels, and a least-squares baseline;
//! - [`features`]: CSV ingestion, correlation-based covariate pruning,
//!   dummy coding with rare-class removal, and design-matrix assembly;
//! - [`validation`]: leave-one-out cross-validation scored by quantile
//!   loss, and a deterministic case-resampling bootstrap;
//! - [`raster`]: gridded prediction per level, interquartile-range
//!   uncertainty layers, block-mean downscaling, and cross-map comparison;
//! - [`oracle`]: brute-force and synthetic-data anchors used by tests.

pub mod design;
pub mod error;
pub mod features;
pub mod oracle;
pub mod qr;
pub mod raster;
pub mod stats;
pub mod validation;

pub use design::{ColumnKind, ColumnMeta, DesignMatrix};
pub use error::{Error, Result};
