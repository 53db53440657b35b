//! Quantile-regression fits: single level, and profiles across a grid.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::qr::loss::{pinball_sum, Tau};
use crate::qr::solver::{solve_interior, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    /// The fit is an exact vertex solution interpolating p+1 observations;
    /// residuals at those observations are stored as exact zeros.
    Vertex,
    /// The interior-point iterate was returned as-is (optimum may be a face,
    /// or no valid vertex basis was identified).
    Interior,
    /// The iteration cap was reached before the gap tolerance; the best
    /// iterate found is returned.
    MaxIter,
}

/// A fitted quantile-regression model at one level.
#[derive(Debug, Clone)]
pub struct QuantileFit {
    pub tau: Tau,
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    /// Sum of the pinball loss over `residuals`.
    pub objective: f64,
    pub solver_status: SolverStatus,
    pub iterations: usize,
}

impl QuantileFit {
    /// Fitted values for a design with the same columns.
    pub fn predict(&self, design: &DesignMatrix) -> DVector<f64> {
        design.predict(&self.beta)
    }

    /// Number of residuals stored as exactly zero.
    pub fn zero_residuals(&self) -> usize {
        self.residuals.iter().filter(|&&r| r == 0.0).count()
    }
}

/// Fits the conditional tau-quantile plane by minimizing the summed pinball
/// loss.
///
/// The interior-point solution is polished onto an exact vertex whenever a
/// nonsingular interpolation basis can be identified and does not worsen the
/// objective; this is the generic outcome on continuous data.
pub fn fit_quantile(
    design: &DesignMatrix,
    y: &DVector<f64>,
    tau: Tau,
    opts: &SolverOptions,
) -> Result<QuantileFit> {
    let n = design.nrows();
    if y.len() != n {
        return Err(Error::Dimension {
            what: "response length".into(),
            expected: n,
            got: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("non-finite response value"));
    }

    let x = design.values();
    let sol = solve_interior(x, y, tau.value(), opts)?;
    let ipm_residuals = y - x * &sol.beta;
    let ipm_objective = pinball_sum(ipm_residuals.iter(), tau);

    let polished = polish_vertex(x, y, tau, &sol.weights, &ipm_residuals);
    let accept = polished.as_ref().is_some_and(|p| {
        p.objective <= ipm_objective + 1e-9 * (1.0 + ipm_objective.abs())
    });

    let (beta, residuals, objective, vertex) = if accept {
        let p = polished.unwrap();
        (p.beta, p.residuals, p.objective, true)
    } else {
        (sol.beta, ipm_residuals, ipm_objective, false)
    };

    let solver_status = if !sol.converged {
        SolverStatus::MaxIter
    } else if vertex {
        SolverStatus::Vertex
    } else {
        SolverStatus::Interior
    };

    Ok(QuantileFit {
        tau,
        beta,
        residuals,
        objective,
        solver_status,
        iterations: sol.iterations,
    })
}

/// Independent fits across a strictly increasing grid of levels.
#[derive(Debug, Clone)]
pub struct QuantileProfile {
    pub fits: Vec<QuantileFit>,
}

impl QuantileProfile {
    pub fn taus(&self) -> Vec<Tau> {
        self.fits.iter().map(|f| f.tau).collect()
    }

    /// Coefficients as a (levels x columns) matrix.
    pub fn beta_matrix(&self) -> DMatrix<f64> {
        let rows = self.fits.len();
        let cols = self.fits.first().map_or(0, |f| f.beta.len());
        DMatrix::from_fn(rows, cols, |i, j| self.fits[i].beta[j])
    }
}

/// Fits one model per level. Each level is fitted independently; failures
/// carry the offending level.
pub fn fit_profile(
    design: &DesignMatrix,
    y: &DVector<f64>,
    taus: &[Tau],
    opts: &SolverOptions,
) -> Result<QuantileProfile> {
    Tau::validate_grid(taus)?;
    let fits: Vec<Result<QuantileFit>> = taus
        .par_iter()
        .map(|&tau| {
            fit_quantile(design, y, tau, opts).map_err(|e| Error::at_tau(tau.value(), e))
        })
        .collect();
    let mut out = Vec::with_capacity(fits.len());
    for fit in fits {
        out.push(fit?);
    }
    Ok(QuantileProfile { fits: out })
}

struct Polished {
    beta: DVector<f64>,
    residuals: DVector<f64>,
    objective: f64,
}

/// Attempts to replace an interior iterate with the exact vertex it is
/// converging to. Candidate interpolation rows are ranked two ways: by how
/// far the dual weight sits from the box bounds, and by interior-point
/// residual magnitude. The best nonsingular basis wins if it does not lose
/// on the objective.
fn polish_vertex(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    tau: Tau,
    weights: &DVector<f64>,
    ipm_residuals: &DVector<f64>,
) -> Option<Polished> {
    let n = x.nrows();

    let mut by_interiority: Vec<usize> = (0..n).collect();
    by_interiority.sort_by(|&a, &b| {
        let sa = weights[a].min(1.0 - weights[a]);
        let sb = weights[b].min(1.0 - weights[b]);
        sb.total_cmp(&sa).then(a.cmp(&b))
    });

    let mut by_residual: Vec<usize> = (0..n).collect();
    by_residual.sort_by(|&a, &b| {
        ipm_residuals[a]
            .abs()
            .total_cmp(&ipm_residuals[b].abs())
            .then(a.cmp(&b))
    });

    let mut best: Option<Polished> = None;
    for order in [&by_interiority, &by_residual] {
        if let Some(candidate) = try_basis(x, y, tau, order) {
            best = match best {
                Some(prev) if prev.objective <= candidate.objective => Some(prev),
                _ => Some(candidate),
            };
        }
    }
    best
}

fn try_basis(x: &DMatrix<f64>, y: &DVector<f64>, tau: Tau, order: &[usize]) -> Option<Polished> {
    let m = x.ncols();
    let basis = greedy_independent_rows(x, order, m)?;
    let xb = x.select_rows(basis.iter());
    let yb = DVector::from_iterator(m, basis.iter().map(|&i| y[i]));
    let beta = xb.lu().solve(&yb)?;
    if beta.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut residuals = y - x * &beta;
    // The plane interpolates the basis rows by construction; store the exact
    // zeros rather than the rounding noise of recomputation.
    for &i in &basis {
        residuals[i] = 0.0;
    }
    let objective = pinball_sum(residuals.iter(), tau);
    Some(Polished {
        beta,
        residuals,
        objective,
    })
}

/// First `m` rows (in `order`) that are linearly independent, found by
/// modified Gram-Schmidt with one re-orthogonalization pass.
fn greedy_independent_rows(x: &DMatrix<f64>, order: &[usize], m: usize) -> Option<Vec<usize>> {
    let mut basis_vectors: Vec<DVector<f64>> = Vec::with_capacity(m);
    let mut chosen = Vec::with_capacity(m);
    for &i in order {
        let mut v = x.row(i).transpose();
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &basis_vectors {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-10 * norm0 {
            basis_vectors.push(v / norm);
            chosen.push(i);
            if chosen.len() == m {
                chosen.sort_unstable();
                return Some(chosen);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::intercept_only;

    fn tau(v: f64) -> Tau {
        Tau::new(v).unwrap()
    }

    #[test]
    fn intercept_only_median_is_sample_median() {
        let design = intercept_only(5).unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let fit = fit_quantile(&design, &y, tau(0.5), &SolverOptions::default()).unwrap();
        assert_eq!(fit.beta.len(), 1);
        assert_eq!(fit.beta[0], 3.0);
        assert_eq!(fit.solver_status, SolverStatus::Vertex);
        // Objective recomputes from stored residuals by definition.
        assert_eq!(fit.objective, pinball_sum(fit.residuals.iter(), fit.tau));
    }

    #[test]
    fn response_length_mismatch_is_an_error() {
        let design = intercept_only(5).unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert!(fit_quantile(&design, &y, tau(0.5), &SolverOptions::default()).is_err());
    }

    #[test]
    fn singleton_profile_equals_single_fit() {
        let design = intercept_only(7).unwrap();
        let y = DVector::from_vec(vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0]);
        let single = fit_quantile(&design, &y, tau(0.5), &SolverOptions::default()).unwrap();
        let profile = fit_profile(&design, &y, &[tau(0.5)], &SolverOptions::default()).unwrap();
        assert_eq!(profile.fits.len(), 1);
        assert_eq!(profile.fits[0].beta, single.beta);
        assert_eq!(profile.fits[0].objective, single.objective);
    }

    #[test]
    fn intercept_only_profile_is_monotone() {
        let design = intercept_only(40).unwrap();
        let y = DVector::from_fn(40, |i, _| ((i * 37 + 11) % 40) as f64 * 0.7 - 3.0);
        let profile =
            fit_profile(&design, &y, &Tau::default_grid(), &SolverOptions::default()).unwrap();
        assert_eq!(profile.fits.len(), 19);
        for pair in profile.fits.windows(2) {
            assert!(
                pair[1].beta[0] >= pair[0].beta[0],
                "intercepts must be non-decreasing in tau"
            );
        }
    }
}
