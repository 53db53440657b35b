//! Order-statistic summaries of bootstrap coefficient ensembles.

use crate::error::{Error, Result};
use crate::qr::Tau;
use crate::stats::rank_quantile_sorted;
use crate::validation::bootstrap::BootstrapEnsemble;

/// Below this many successful replicates, confidence limits are refused;
/// the 2.5% tail would sit on a single order statistic.
pub const MIN_REPLICATES_FOR_CI: usize = 40;

#[derive(Debug, Clone)]
pub struct CoefficientStat {
    pub tau: Tau,
    pub column: String,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    /// Tukey whiskers: the most extreme draws within 1.5 IQR of the
    /// quartiles.
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    /// Pointwise 95% percentile interval, when enough replicates exist.
    pub ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct CoefficientSummary {
    /// Levels in input order, columns in design order within each level.
    pub rows: Vec<CoefficientStat>,
}

/// Per-column, per-level order statistics of the draws. Quartiles, medians,
/// and confidence limits all use the rank rule `ceil(p * B)` on the sorted
/// draws.
pub fn summarize_coefficients(ensembles: &[BootstrapEnsemble]) -> Result<CoefficientSummary> {
    let first = ensembles
        .first()
        .ok_or_else(|| Error::schema("no ensembles to summarize"))?;
    for e in ensembles {
        if e.column_names != first.column_names {
            return Err(Error::schema(
                "ensembles do not share the same design columns",
            ));
        }
    }

    let mut rows = Vec::new();
    for e in ensembles {
        let b = e.draws.nrows();
        if b == 0 {
            return Err(Error::numerical(format!(
                "ensemble at tau = {} has no successful draws",
                e.tau
            )));
        }
        for (j, column) in e.column_names.iter().enumerate() {
            let mut draws = e.column_draws(j);
            draws.sort_by(|a, b| a.total_cmp(b));
            let median = rank_quantile_sorted(&draws, 0.5);
            let q25 = rank_quantile_sorted(&draws, 0.25);
            let q75 = rank_quantile_sorted(&draws, 0.75);
            let iqr = q75 - q25;
            let lo_fence = q25 - 1.5 * iqr;
            let hi_fence = q75 + 1.5 * iqr;
            let whisker_lo = draws
                .iter()
                .copied()
                .find(|&v| v >= lo_fence)
                .unwrap_or(draws[0]);
            let whisker_hi = draws
                .iter()
                .rev()
                .copied()
                .find(|&v| v <= hi_fence)
                .unwrap_or(draws[b - 1]);
            let ci = if b >= MIN_REPLICATES_FOR_CI {
                Some((
                    rank_quantile_sorted(&draws, 0.025),
                    rank_quantile_sorted(&draws, 0.975),
                ))
            } else {
                None
            };
            rows.push(CoefficientStat {
                tau: e.tau,
                column: column.clone(),
                median,
                q25,
                q75,
                whisker_lo,
                whisker_hi,
                ci,
            });
        }
    }
    Ok(CoefficientSummary { rows })
}
