//! Independent correctness anchors: exhaustive enumeration for tiny
//! problems and a generator with known quantile structure.

mod brute;
mod synthetic;

pub use brute::{brute_force_qr, MAX_PREDICTORS, MAX_ROWS};
pub use synthetic::{NoiseKind, SyntheticSpec};
