//! Estimators: the pinball loss, the quantile-regression LP solver, and the
//! least-squares baseline.

mod fit;
mod loss;
mod ols;
mod solver;

pub use fit::{fit_profile, fit_quantile, QuantileFit, QuantileProfile, SolverStatus};
pub use loss::{pinball_loss, pinball_sum, Tau};
pub use ols::{fit_ols, OlsFit};
pub use solver::SolverOptions;
