//! Model validation: leave-one-out cross-validation and the case-resampling
//! bootstrap.

mod bootstrap;
mod loocv;
mod summary;

pub use bootstrap::{
    bootstrap, refit_on_indices, BootstrapEnsemble, DEFAULT_REPLICATES,
};
pub use loocv::{loocv, CvReport, CvRow};
pub use summary::{summarize_coefficients, CoefficientStat, CoefficientSummary, MIN_REPLICATES_FOR_CI};
