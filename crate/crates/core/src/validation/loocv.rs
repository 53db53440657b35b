//! Leave-one-out cross-validation scored by the quantile loss.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::design::{intercept_only, DesignMatrix};
use crate::error::{Error, Result};
use crate::qr::{fit_quantile, pinball_loss, SolverOptions, Tau};

/// Fraction of rank-deficient folds tolerated before the run is aborted.
const MAX_SKIPPED_FOLD_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy)]
pub struct CvRow {
    pub tau: Tau,
    /// 1 - (held-out pinball sum of the model) / (held-out pinball sum of
    /// the intercept-only reference); at most 1.
    pub r1: f64,
    pub mean_heldout_pinball: f64,
    /// Folds actually scored.
    pub n: usize,
    pub skipped_folds: usize,
}

#[derive(Debug, Clone)]
pub struct CvReport {
    pub rows: Vec<CvRow>,
}

/// Held-out pinball losses for one fold across all levels: (model,
/// reference) pairs.
type FoldLosses = Vec<(f64, f64)>;

/// Leave-one-out cross-validation of the design against the intercept-only
/// reference, at every level of `taus`.
///
/// Folds whose reduced design loses rank are skipped and counted; more than
/// 1% skipped aborts. Fold results are reduced in fold order, so the report
/// does not depend on scheduling.
pub fn loocv(
    design: &DesignMatrix,
    y: &DVector<f64>,
    taus: &[Tau],
    opts: &SolverOptions,
) -> Result<CvReport> {
    Tau::validate_grid(taus)?;
    let n = design.nrows();
    let m = design.ncols();
    if y.len() != n {
        return Err(Error::Dimension {
            what: "response length".into(),
            expected: n,
            got: y.len(),
        });
    }
    if n < m + 1 {
        return Err(Error::design(format!(
            "leave-one-out needs n >= p + 2 so folds stay overdetermined (n = {n}, p + 1 = {m})"
        )));
    }

    let reference = intercept_only(n - 1)?;
    let fold_results: Vec<Option<Result<FoldLosses>>> = (0..n)
        .into_par_iter()
        .map(|i| fold_losses(design, &reference, y, i, taus, opts))
        .collect();

    let mut skipped = 0usize;
    let mut model_sums = vec![0.0f64; taus.len()];
    let mut reference_sums = vec![0.0f64; taus.len()];
    let mut scored = 0usize;
    for fold in fold_results {
        match fold {
            None => skipped += 1,
            Some(losses) => {
                let losses = losses?;
                scored += 1;
                for (t, (model, reference)) in losses.into_iter().enumerate() {
                    model_sums[t] += model;
                    reference_sums[t] += reference;
                }
            }
        }
    }

    if (skipped as f64) > MAX_SKIPPED_FOLD_FRACTION * n as f64 {
        return Err(Error::data(format!(
            "{skipped} of {n} cross-validation folds were rank deficient (more than 1%)"
        )));
    }

    let rows = taus
        .iter()
        .enumerate()
        .map(|(t, &tau)| {
            let r1 = if reference_sums[t] == 0.0 && model_sums[t] == 0.0 {
                0.0
            } else {
                1.0 - model_sums[t] / reference_sums[t]
            };
            CvRow {
                tau,
                r1,
                mean_heldout_pinball: model_sums[t] / scored as f64,
                n: scored,
                skipped_folds: skipped,
            }
        })
        .collect();
    Ok(CvReport { rows })
}

/// `None` marks a rank-deficient fold; errors from the solver propagate.
fn fold_losses(
    design: &DesignMatrix,
    reference: &DesignMatrix,
    y: &DVector<f64>,
    holdout: usize,
    taus: &[Tau],
    opts: &SolverOptions,
) -> Option<Result<FoldLosses>> {
    let fold_design = match design.without_row(holdout) {
        Ok(d) => d,
        Err(Error::RankDeficient { .. }) => return None,
        Err(e) => return Some(Err(e)),
    };
    let n = design.nrows();
    let fold_y = DVector::from_iterator(
        n - 1,
        (0..n).filter(|&i| i != holdout).map(|i| y[i]),
    );
    let x_i = design.values().row(holdout).transpose();

    let mut losses = Vec::with_capacity(taus.len());
    for &tau in taus {
        let model = match fit_quantile(&fold_design, &fold_y, tau, opts) {
            Ok(f) => f,
            Err(e) => return Some(Err(Error::at_tau(tau.value(), e))),
        };
        let reference_fit = match fit_quantile(reference, &fold_y, tau, opts) {
            Ok(f) => f,
            Err(e) => return Some(Err(Error::at_tau(tau.value(), e))),
        };
        let model_pred = model.beta.dot(&x_i);
        let reference_pred = reference_fit.beta[0];
        losses.push((
            pinball_loss(y[holdout] - model_pred, tau),
            pinball_loss(y[holdout] - reference_pred, tau),
        ));
    }
    Some(Ok(losses))
}
