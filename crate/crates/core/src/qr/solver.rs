//! Primal-dual interior-point solver for the quantile-regression linear
//! program.
//!
//! The fit at level tau is the linear program
//!
//! ```text
//! minimize  c'x   subject to  X'x = (1 - tau) X'1,   0 <= x <= 1
//! ```
//!
//! with `c = -y`; the regression coefficients are the negated multipliers of
//! the equality constraints. A Mehrotra predictor-corrector iteration drives
//! the complementarity gap below tolerance. Each step solves one (p+1) x
//! (p+1) weighted normal-equations system, so the cost per iteration is
//! O(n p^2) and the solver scales to the bootstrap workloads this crate runs.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Fraction of the distance to the boundary taken by each step.
const STEP_FRACTION: f64 = 0.99995;

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Stop once the complementarity gap falls below
    /// `gap_tol * (1 + |c'x|)`.
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Raw solver output, before vertex polishing.
#[derive(Debug, Clone)]
pub(crate) struct InteriorSolution {
    pub beta: DVector<f64>,
    /// Final primal LP variables (the dual weights of the regression
    /// problem), each in (0, 1). Values far from both bounds mark the
    /// observations the optimal plane interpolates.
    pub weights: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Runs the interior-point iteration for the given design, response, and
/// level. `design` must have full column rank (callers validate).
pub(crate) fn solve_interior(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    tau: f64,
    opts: &SolverOptions,
) -> Result<InteriorSolution> {
    let n = x.nrows();
    let m = x.ncols();
    debug_assert_eq!(y.len(), n);

    let c = -y;

    // Primal start: the analytic center of the feasible box slice,
    // which satisfies X'x = (1 - tau) X'1 exactly.
    let mut xw = DVector::from_element(n, 1.0 - tau);
    let mut s = DVector::from_element(n, tau);

    // Dual start from least squares on c, then split the dual residual into
    // positive parts with a uniform cushion to stay strictly interior.
    let xtx = x.tr_mul(x);
    let mut dual = match Cholesky::new(xtx) {
        Some(chol) => chol.solve(&x.tr_mul(&c)),
        None => {
            return Err(Error::numerical(
                "normal equations not positive definite despite rank check",
            ))
        }
    };
    let resid = &c - x * &dual;
    let cushion = (0.1 * resid.amax()).max(1e-4);
    let mut z = resid.map(|r| r.max(0.0) + cushion);
    let mut w = resid.map(|r| (-r).max(0.0) + cushion);

    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        let gap = xw.dot(&z) + s.dot(&w);
        let primal_obj = c.dot(&xw);
        if gap < opts.gap_tol * (1.0 + primal_obj.abs()) {
            converged = true;
            break;
        }
        iterations += 1;

        // Diagonal scaling q = 1 / (z/x + w/s).
        let q = DVector::from_fn(n, |i, _| 1.0 / (z[i] / xw[i] + w[i] / s[i]));

        // Affine (predictor) direction.
        let m_mat = weighted_gram(x, &q);
        let chol = factor(m_mat)?;
        let zw = &z - &w;
        let rhs_aff = x.tr_mul(&q.component_mul(&zw));
        let dy_aff = chol.solve(&rhs_aff);
        let t_aff = x * &dy_aff;
        let dx_aff = q.component_mul(&(&t_aff - &zw));
        let dz_aff = DVector::from_fn(n, |i, _| -(z[i] / xw[i]) * (xw[i] + dx_aff[i]));
        let dw_aff = DVector::from_fn(n, |i, _| (w[i] / s[i]) * (dx_aff[i] - s[i]));

        let ap_aff = primal_step(&xw, &s, &dx_aff);
        let ad_aff = dual_step(&z, &w, &dz_aff, &dw_aff);

        let mu = gap / (2.0 * n as f64);
        let mu_aff = {
            let mut acc = 0.0;
            for i in 0..n {
                acc += (xw[i] + ap_aff * dx_aff[i]) * (z[i] + ad_aff * dz_aff[i]);
                acc += (s[i] - ap_aff * dx_aff[i]) * (w[i] + ad_aff * dw_aff[i]);
            }
            acc / (2.0 * n as f64)
        };
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);
        let target = sigma * mu;

        // Corrector: re-solve with centering plus second-order terms.
        let g = DVector::from_fn(n, |i, _| (target - dx_aff[i] * dz_aff[i]) / xw[i] - z[i]);
        let h = DVector::from_fn(n, |i, _| (target + dx_aff[i] * dw_aff[i]) / s[i] - w[i]);
        let rhs = x.tr_mul(&q.component_mul(&(&h - &g)));
        let dy = chol.solve(&rhs);
        let t = x * &dy;
        let dx = DVector::from_fn(n, |i, _| q[i] * (t[i] + g[i] - h[i]));
        let dz = DVector::from_fn(n, |i, _| g[i] - (z[i] / xw[i]) * dx[i]);
        let dw = DVector::from_fn(n, |i, _| h[i] + (w[i] / s[i]) * dx[i]);

        let ap = primal_step(&xw, &s, &dx);
        let ad = dual_step(&z, &w, &dz, &dw);
        if ap <= 1e-14 && ad <= 1e-14 {
            break; // stalled; report best iterate as non-converged
        }

        xw.axpy(ap, &dx, 1.0);
        dual.axpy(ad, &dy, 1.0);
        z.axpy(ad, &dz, 1.0);
        w.axpy(ad, &dw, 1.0);
        for i in 0..n {
            // Guard against rounding onto the box boundary.
            xw[i] = xw[i].clamp(1e-300, 0.999_999_999_999_999_9);
            s[i] = 1.0 - xw[i];
        }
    }

    if !converged {
        let gap = xw.dot(&z) + s.dot(&w);
        converged = gap < opts.gap_tol * (1.0 + c.dot(&xw).abs());
    }

    Ok(InteriorSolution {
        beta: -dual,
        weights: xw,
        iterations,
        converged,
    })
}

/// X' diag(q) X via row scaling by sqrt(q).
fn weighted_gram(x: &DMatrix<f64>, q: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = x.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row *= q[i].sqrt();
    }
    scaled.tr_mul(&scaled)
}

/// Cholesky with escalating jitter; the scaling matrix becomes numerically
/// semidefinite near convergence.
fn factor(mut m: DMatrix<f64>) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let scale = {
        let tr: f64 = m.diagonal().iter().sum();
        (tr / m.nrows() as f64).max(f64::MIN_POSITIVE)
    };
    let mut jitter = 0.0;
    for attempt in 0..4 {
        if attempt > 0 {
            jitter = if jitter == 0.0 {
                1e-13 * scale
            } else {
                jitter * 100.0
            };
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
        }
        if let Some(chol) = Cholesky::new(m.clone()) {
            return Ok(chol);
        }
    }
    Err(Error::numerical(
        "weighted normal equations could not be factorized",
    ))
}

/// Largest primal step keeping x and s strictly positive.
fn primal_step(x: &DVector<f64>, s: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    let mut alpha = 1.0f64;
    for i in 0..x.len() {
        if dx[i] < 0.0 {
            alpha = alpha.min(STEP_FRACTION * (-x[i] / dx[i]));
        } else if dx[i] > 0.0 {
            alpha = alpha.min(STEP_FRACTION * (s[i] / dx[i]));
        }
    }
    alpha
}

/// Largest dual step keeping z and w strictly positive.
fn dual_step(z: &DVector<f64>, w: &DVector<f64>, dz: &DVector<f64>, dw: &DVector<f64>) -> f64 {
    let mut alpha = 1.0f64;
    for i in 0..z.len() {
        if dz[i] < 0.0 {
            alpha = alpha.min(STEP_FRACTION * (-z[i] / dz[i]));
        }
        if dw[i] < 0.0 {
            alpha = alpha.min(STEP_FRACTION * (-w[i] / dw[i]));
        }
    }
    alpha
}
