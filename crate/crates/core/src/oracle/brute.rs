//! Exhaustive quantile-regression solver for tiny instances.
//!
//! An optimal basic solution of the quantile-regression LP interpolates p+1
//! observations, so enumerating every interpolating hyperplane and taking
//! the best objective attains the global optimum. Exponential by design;
//! used as the correctness anchor for the interior-point path.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::qr::{pinball_sum, Tau};

pub const MAX_ROWS: usize = 20;
pub const MAX_PREDICTORS: usize = 3;

/// Globally optimal (beta, objective) by enumeration of all (p+1)-subsets in
/// general position. Ties, and subsets whose rows are affinely dependent,
/// resolve deterministically: the lexicographically smallest optimal subset
/// wins, degenerate subsets are skipped.
pub fn brute_force_qr(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    tau: Tau,
) -> Result<(DVector<f64>, f64)> {
    let n = x.nrows();
    let m = x.ncols();
    if y.len() != n {
        return Err(Error::Dimension {
            what: "response length".into(),
            expected: n,
            got: y.len(),
        });
    }
    if n > MAX_ROWS || m > MAX_PREDICTORS + 1 {
        return Err(Error::numerical(format!(
            "enumeration limited to n <= {MAX_ROWS}, p <= {MAX_PREDICTORS}; got n = {n}, p = {}",
            m.saturating_sub(1)
        )));
    }
    if m > n {
        return Err(Error::design("fewer rows than columns"));
    }

    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        if let Some((beta, objective)) = evaluate_subset(x, y, tau, &subset) {
            let better = match &best {
                Some((_, cur)) => objective < *cur,
                None => true,
            };
            if better {
                best = Some((beta, objective));
            }
        }
        if !advance(&mut subset, n) {
            break;
        }
    }

    best.ok_or_else(|| Error::numerical("every candidate subset was degenerate"))
}

fn evaluate_subset(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    tau: Tau,
    subset: &[usize],
) -> Option<(DVector<f64>, f64)> {
    let m = x.ncols();
    let xb = x.select_rows(subset.iter());
    let yb = DVector::from_iterator(m, subset.iter().map(|&i| y[i]));
    let beta = xb.lu().solve(&yb)?;
    if beta.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut residuals = y - x * &beta;
    for &i in subset {
        residuals[i] = 0.0;
    }
    Some((beta, pinball_sum(residuals.iter(), tau)))
}

/// Next k-combination of 0..n in lexicographic order.
fn advance(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
