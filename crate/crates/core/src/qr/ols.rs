//! Ordinary least squares, kept as the mean-regression baseline.

use nalgebra::DVector;

use crate::design::DesignMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    /// Residual variance estimate rss / (n - p - 1); zero when the fit is
    /// saturated.
    pub sigma2_hat: f64,
}

impl OlsFit {
    /// Standard error of coefficient `j` under homoscedastic errors.
    pub fn standard_error(&self, design: &DesignMatrix, j: usize) -> Result<f64> {
        let xtx = design.values().tr_mul(design.values());
        let inv = xtx
            .try_inverse()
            .ok_or_else(|| Error::numerical("X'X not invertible"))?;
        Ok((self.sigma2_hat * inv[(j, j)]).sqrt())
    }
}

/// Least-squares fit via singular value decomposition.
pub fn fit_ols(design: &DesignMatrix, y: &DVector<f64>) -> Result<OlsFit> {
    let n = design.nrows();
    let m = design.ncols();
    if y.len() != n {
        return Err(Error::Dimension {
            what: "response length".into(),
            expected: n,
            got: y.len(),
        });
    }
    let svd = design.values().clone().svd(true, true);
    let smax = svd.singular_values.max();
    let beta = svd
        .solve(y, 1e-12 * smax)
        .map_err(|e| Error::numerical(format!("least-squares solve failed: {e}")))?;
    let residuals = y - design.values() * &beta;
    let rss = residuals.norm_squared();
    let sigma2_hat = if n > m { rss / (n - m) as f64 } else { 0.0 };
    Ok(OlsFit {
        beta,
        residuals,
        rss,
        sigma2_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{intercept_only, ColumnMeta, DesignMatrix};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn intercept_only_recovers_the_mean() {
        let design = intercept_only(4).unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 6.0]);
        let fit = fit_ols(&design, &y).unwrap();
        assert_relative_eq!(fit.beta[0], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn exact_linear_data_has_zero_rss() {
        let values = DMatrix::from_fn(6, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let cols = vec![ColumnMeta::intercept(), ColumnMeta::continuous("x", "x")];
        let design = DesignMatrix::new(values, cols).unwrap();
        let y = DVector::from_fn(6, |i, _| 2.0 + 3.0 * i as f64);
        let fit = fit_ols(&design, &y).unwrap();
        assert!(fit.rss < 1e-20, "rss = {}", fit.rss);
        assert!(fit.residuals.amax() < 1e-10);
    }

    #[test]
    fn normal_equations_hold() {
        let values = DMatrix::from_fn(30, 3, |i, j| match j {
            0 => 1.0,
            1 => (i as f64 * 0.37).sin(),
            _ => (i as f64 * 0.11).cos() * 2.0,
        });
        let cols = vec![
            ColumnMeta::intercept(),
            ColumnMeta::continuous("a", "a"),
            ColumnMeta::continuous("b", "b"),
        ];
        let design = DesignMatrix::new(values, cols).unwrap();
        let y = DVector::from_fn(30, |i, _| (i as f64 * 0.77).sin() * 5.0 + 1.0);
        let fit = fit_ols(&design, &y).unwrap();
        let xtr = design.values().tr_mul(&fit.residuals);
        assert!(xtr.amax() < 1e-8, "X'r = {xtr}");
    }
}
