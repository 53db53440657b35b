//! The numeric design matrix and its column metadata.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance on pivoted-QR diagonal magnitudes used for rank
/// detection.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Intercept,
    Continuous,
    Dummy,
}

/// Metadata for one design column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMeta {
    pub name: String,
    pub kind: ColumnKind,
    /// Name of the covariate this column was derived from; `None` for the
    /// intercept.
    pub source_covariate: Option<String>,
}

impl ColumnMeta {
    pub fn intercept() -> Self {
        ColumnMeta {
            name: "(Intercept)".to_string(),
            kind: ColumnKind::Intercept,
            source_covariate: None,
        }
    }

    pub fn continuous(name: impl Into<String>, source: impl Into<String>) -> Self {
        ColumnMeta {
            name: name.into(),
            kind: ColumnKind::Continuous,
            source_covariate: Some(source.into()),
        }
    }

    pub fn dummy(name: impl Into<String>, source: impl Into<String>) -> Self {
        ColumnMeta {
            name: name.into(),
            kind: ColumnKind::Dummy,
            source_covariate: Some(source.into()),
        }
    }
}

/// An n-by-(p+1) model matrix whose first column is the intercept.
///
/// Construction validates shape, the intercept column, 0/1 coding of dummy
/// columns, and full column rank; downstream solvers rely on these
/// invariants and do not re-check them.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    values: DMatrix<f64>,
    columns: Vec<ColumnMeta>,
}

impl DesignMatrix {
    pub fn new(values: DMatrix<f64>, columns: Vec<ColumnMeta>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::design("no columns"));
        }
        if values.ncols() != columns.len() {
            return Err(Error::Dimension {
                what: "design columns".into(),
                expected: columns.len(),
                got: values.ncols(),
            });
        }
        if values.nrows() < values.ncols() {
            return Err(Error::design(format!(
                "need at least as many rows as columns, got {} rows for {} columns",
                values.nrows(),
                values.ncols()
            )));
        }
        if columns[0].kind != ColumnKind::Intercept {
            return Err(Error::design("first column must be the intercept"));
        }
        if columns.iter().skip(1).any(|c| c.kind == ColumnKind::Intercept) {
            return Err(Error::design("multiple intercept columns"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::design("non-finite value in design matrix"));
        }
        if values.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::design("intercept column must be all ones"));
        }
        for (j, meta) in columns.iter().enumerate() {
            if meta.kind == ColumnKind::Dummy
                && values.column(j).iter().any(|&v| v != 0.0 && v != 1.0)
            {
                return Err(Error::design(format!(
                    "dummy column `{}` contains values other than 0 and 1",
                    meta.name
                )));
            }
        }
        check_full_rank(&values, &columns)?;
        Ok(DesignMatrix { values, columns })
    }

    /// Rows picked by index (with repetition allowed), keeping the column
    /// metadata. Used by case-resampling; only the rank invariant can break,
    /// so only that is re-checked.
    pub fn resample(&self, indices: &[usize]) -> Result<Self> {
        let sub = self.values.select_rows(indices.iter());
        if sub.nrows() < self.ncols() {
            return Err(Error::design("resample smaller than column count"));
        }
        check_full_rank(&sub, &self.columns)?;
        Ok(DesignMatrix {
            values: sub,
            columns: self.columns.clone(),
        })
    }

    /// Rows excluding one index (leave-one-out fold).
    pub fn without_row(&self, index: usize) -> Result<Self> {
        let keep: Vec<usize> = (0..self.nrows()).filter(|&i| i != index).collect();
        self.resample(&keep)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    /// Total column count, p + 1.
    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// Prediction x_i . beta for one row.
    pub fn predict_row(&self, i: usize, beta: &DVector<f64>) -> f64 {
        self.values.row(i).transpose().dot(beta)
    }

    /// X . beta for all rows.
    pub fn predict(&self, beta: &DVector<f64>) -> DVector<f64> {
        &self.values * beta
    }
}

/// Builds an intercept-only design with `n` rows.
pub fn intercept_only(n: usize) -> Result<DesignMatrix> {
    DesignMatrix::new(DMatrix::from_element(n, 1, 1.0), vec![ColumnMeta::intercept()])
}

fn check_full_rank(values: &DMatrix<f64>, columns: &[ColumnMeta]) -> Result<()> {
    let (rank, pivots) = pivoted_qr_rank(values, RANK_TOLERANCE);
    if rank == values.ncols() {
        return Ok(());
    }
    // Explain each dependent column in terms of the independent ones.
    let independent: Vec<usize> = pivots[..rank].to_vec();
    let mut dependent = Vec::new();
    for &j in &pivots[rank..] {
        let on = explain_dependency(values, &independent, j, columns);
        dependent.push((columns[j].name.clone(), on));
    }
    dependent.sort();
    Err(Error::RankDeficient { dependent })
}

/// Least-squares expansion of column `j` on the independent set; returns the
/// names of columns with non-negligible weight.
fn explain_dependency(
    values: &DMatrix<f64>,
    independent: &[usize],
    j: usize,
    columns: &[ColumnMeta],
) -> Vec<String> {
    let basis = values.select_columns(independent.iter());
    let target = values.column(j).into_owned();
    let svd = basis.svd(true, true);
    let Ok(coef) = svd.solve(&target, 1e-12) else {
        return Vec::new();
    };
    let cmax = coef.amax().max(1e-12);
    let mut on: Vec<String> = independent
        .iter()
        .zip(coef.iter())
        .filter(|(_, &c)| c.abs() > 1e-6 * cmax)
        .map(|(&k, _)| columns[k].name.clone())
        .collect();
    on.sort();
    on
}

/// Householder QR with column pivoting; returns (rank, pivot order).
///
/// Rank counts leading diagonal magnitudes above `rel_tol` times the largest
/// one.
pub(crate) fn pivoted_qr_rank(matrix: &DMatrix<f64>, rel_tol: f64) -> (usize, Vec<usize>) {
    let n = matrix.nrows();
    let m = matrix.ncols();
    let mut a = matrix.clone();
    let mut pivots: Vec<usize> = (0..m).collect();
    let mut diag = vec![0.0f64; m.min(n)];

    let steps = m.min(n);
    for k in 0..steps {
        // Exact column norms over the trailing block; m is small so the
        // recomputation is cheap and avoids downdating drift.
        let (best, best_norm) = (k..m)
            .map(|j| (j, a.view_range(k.., j..j + 1).norm_squared()))
            .fold((k, f64::NEG_INFINITY), |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            });
        if best != k {
            a.swap_columns(k, best);
            pivots.swap(k, best);
        }
        let norm = best_norm.sqrt();
        diag[k] = norm;
        if norm == 0.0 {
            continue;
        }
        // Householder vector for column k below row k.
        let mut v = a.view_range(k.., k..k + 1).into_owned();
        let alpha = -v[0].signum() * norm;
        v[0] -= alpha;
        let vnorm2 = v.norm_squared();
        if vnorm2 == 0.0 {
            continue;
        }
        diag[k] = alpha.abs();
        // Apply I - 2 v v^T / (v^T v) to the trailing columns.
        for j in k..m {
            let col = a.view_range(k.., j..j + 1).into_owned();
            let proj = 2.0 * v.dot(&col) / vnorm2;
            let mut target = a.view_range_mut(k.., j..j + 1);
            for r in 0..target.nrows() {
                target[(r, 0)] = col[r] - proj * v[r];
            }
        }
    }

    let largest = diag.iter().fold(0.0f64, |m, &d| m.max(d.abs()));
    if largest == 0.0 {
        return (0, pivots);
    }
    let mut rank = 0;
    for &d in diag.iter() {
        if d.abs() > rel_tol * largest {
            rank += 1;
        } else {
            break;
        }
    }
    (rank, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta3() -> Vec<ColumnMeta> {
        vec![
            ColumnMeta::intercept(),
            ColumnMeta::continuous("x1", "x1"),
            ColumnMeta::continuous("x2", "x2"),
        ]
    }

    #[test]
    fn accepts_well_formed_matrix() {
        let values = DMatrix::from_row_slice(
            4,
            3,
            &[
                1.0, 0.1, 2.0, //
                1.0, 0.7, -1.0, //
                1.0, -0.3, 0.5, //
                1.0, 1.2, 0.9,
            ],
        );
        let d = DesignMatrix::new(values, meta3()).unwrap();
        assert_eq!(d.nrows(), 4);
        assert_eq!(d.ncols(), 3);
    }

    #[test]
    fn rejects_bad_intercept() {
        let values = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 1.0]);
        let err = DesignMatrix::new(values, vec![ColumnMeta::intercept()]).unwrap_err();
        assert!(matches!(err, Error::Design { .. }));
    }

    #[test]
    fn rejects_non_binary_dummy() {
        let values = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 0.5, 1.0, 1.0]);
        let cols = vec![ColumnMeta::intercept(), ColumnMeta::dummy("lu=A", "lu")];
        let err = DesignMatrix::new(values, cols).unwrap_err();
        assert!(err.to_string().contains("lu=A"));
    }

    #[test]
    fn duplicate_column_is_named_in_rank_error() {
        let values = DMatrix::from_row_slice(
            4,
            3,
            &[
                1.0, 0.1, 0.1, //
                1.0, 0.7, 0.7, //
                1.0, -0.3, -0.3, //
                1.0, 1.2, 1.2,
            ],
        );
        let cols = vec![
            ColumnMeta::intercept(),
            ColumnMeta::continuous("slope", "slope"),
            ColumnMeta::continuous("slope_copy", "slope"),
        ];
        let err = DesignMatrix::new(values, cols).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("slope"), "{msg}");
        assert!(msg.contains("slope_copy"), "{msg}");
    }

    #[test]
    fn more_columns_than_rows_rejected() {
        let values = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(DesignMatrix::new(values, meta3()).is_err());
    }

    #[test]
    fn rank_of_random_full_rank_matrix() {
        let values = DMatrix::from_fn(20, 4, |i, j| ((i * 7 + j * 13) % 17) as f64 + 0.31 * j as f64);
        let (rank, _) = pivoted_qr_rank(&values, RANK_TOLERANCE);
        assert_eq!(rank, 4);
    }
}
