//! Pairwise correlations among continuous covariates and the greedy
//! collinearity filter.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::schema::Dataset;

/// Symmetric Pearson correlation matrix over named covariates.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Correlations among the continuous covariates, computed on transformed
/// (model-scale) values. Requires at least two continuous covariates, each
/// with nonzero variance.
pub fn pearson_matrix(data: &Dataset) -> Result<CorrelationMatrix> {
    let specs: Vec<_> = data.schema().continuous().collect();
    if specs.len() < 2 {
        return Err(Error::schema(
            "correlation analysis needs at least two continuous covariates",
        ));
    }

    let mut names = Vec::with_capacity(specs.len());
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(specs.len());
    for (idx, spec) in &specs {
        let raw = data.continuous_values(*idx);
        let bad: Vec<usize> = raw
            .iter()
            .enumerate()
            .filter(|(_, &v)| !spec.transform.valid_input(v))
            .map(|(i, _)| i)
            .collect();
        if !bad.is_empty() {
            return Err(Error::data(format!(
                "covariate `{}` has {} value(s) outside the domain of its transform (first at row {})",
                spec.name,
                bad.len(),
                bad[0]
            )));
        }
        names.push(spec.name.clone());
        columns.push(raw.iter().map(|&v| spec.transform.apply(v)).collect());
    }

    let k = columns.len();
    let n = data.n();
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let sds: Vec<f64> = columns
        .iter()
        .zip(&means)
        .map(|(c, &m)| c.iter().map(|v| (v - m) * (v - m)).sum::<f64>().sqrt())
        .collect();
    for (j, sd) in sds.iter().enumerate() {
        if *sd == 0.0 {
            return Err(Error::data(format!(
                "covariate `{}` has zero variance",
                names[j]
            )));
        }
    }

    let mut values = DMatrix::identity(k, k);
    for a in 0..k {
        for b in (a + 1)..k {
            let num: f64 = columns[a]
                .iter()
                .zip(&columns[b])
                .map(|(&u, &v)| (u - means[a]) * (v - means[b]))
                .sum();
            let r = (num / (sds[a] * sds[b])).clamp(-1.0, 1.0);
            values[(a, b)] = r;
            values[(b, a)] = r;
        }
    }
    Ok(CorrelationMatrix { names, values })
}

#[derive(Debug, Clone, Serialize)]
pub struct DroppedCovariate {
    pub name: String,
    /// Surviving covariate it was most strongly correlated with at drop time.
    pub partner: String,
    pub r: f64,
}

#[derive(Debug, Clone)]
pub struct CollinearityOutcome {
    pub kept: Vec<String>,
    pub dropped: Vec<DroppedCovariate>,
}

/// Greedy pruning until no surviving pair exceeds the threshold in absolute
/// correlation.
///
/// At each step, among covariates involved in at least one violating pair,
/// the one with the largest mean absolute correlation to the other survivors
/// is dropped; ties drop the later one in input order.
pub fn collinearity_filter(corr: &CorrelationMatrix, threshold: f64) -> CollinearityOutcome {
    let k = corr.names.len();
    let mut alive: Vec<bool> = vec![true; k];
    let mut dropped = Vec::new();

    loop {
        let survivors: Vec<usize> = (0..k).filter(|&i| alive[i]).collect();
        let offenders: Vec<usize> = survivors
            .iter()
            .copied()
            .filter(|&i| {
                survivors
                    .iter()
                    .any(|&j| j != i && corr.values[(i, j)].abs() > threshold)
            })
            .collect();
        if offenders.is_empty() {
            break;
        }

        let mean_abs = |i: usize| -> f64 {
            let others: Vec<f64> = survivors
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| corr.values[(i, j)].abs())
                .collect();
            others.iter().sum::<f64>() / others.len() as f64
        };
        // max_by with ties resolved toward the later index.
        let victim = offenders
            .iter()
            .copied()
            .max_by(|&a, &b| mean_abs(a).total_cmp(&mean_abs(b)).then(a.cmp(&b)))
            .expect("non-empty offenders");

        let partner = survivors
            .iter()
            .copied()
            .filter(|&j| j != victim)
            .max_by(|&a, &b| {
                corr.values[(victim, a)]
                    .abs()
                    .total_cmp(&corr.values[(victim, b)].abs())
            })
            .expect("at least one other survivor");
        dropped.push(DroppedCovariate {
            name: corr.names[victim].clone(),
            partner: corr.names[partner].clone(),
            r: corr.values[(victim, partner)],
        });
        alive[victim] = false;
    }

    CollinearityOutcome {
        kept: (0..k)
            .filter(|&i| alive[i])
            .map(|i| corr.names[i].clone())
            .collect(),
        dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr(names: &[&str], entries: &[(usize, usize, f64)]) -> CorrelationMatrix {
        let k = names.len();
        let mut values = DMatrix::identity(k, k);
        for &(a, b, r) in entries {
            values[(a, b)] = r;
            values[(b, a)] = r;
        }
        CorrelationMatrix {
            names: names.iter().map(|s| s.to_string()).collect(),
            values,
        }
    }

    #[test]
    fn high_pair_drops_one() {
        let c = corr(&["a", "b"], &[(0, 1, 0.85)]);
        let out = collinearity_filter(&c, 0.7);
        assert_eq!(out.kept.len(), 1);
        assert_eq!(out.dropped.len(), 1);
        assert_eq!(out.dropped[0].r, 0.85);
    }

    #[test]
    fn below_threshold_keeps_everything() {
        let c = corr(&["a", "b", "c"], &[(0, 1, 0.69), (0, 2, -0.5), (1, 2, 0.7)]);
        let out = collinearity_filter(&c, 0.7);
        assert_eq!(out.kept, vec!["a", "b", "c"]);
        assert!(out.dropped.is_empty());
    }

    #[test]
    fn mutually_correlated_triple_keeps_one() {
        let c = corr(
            &["a", "b", "c"],
            &[(0, 1, 0.9), (0, 2, 0.9), (1, 2, 0.9)],
        );
        let out = collinearity_filter(&c, 0.7);
        assert_eq!(out.kept.len(), 1);
        assert_eq!(out.dropped.len(), 2);
        // Equal mean correlations: later covariates dropped first, so `a`
        // survives.
        assert_eq!(out.kept[0], "a");
    }

    #[test]
    fn survivors_all_below_threshold() {
        let c = corr(
            &["a", "b", "c", "d"],
            &[(0, 1, 0.95), (1, 2, 0.8), (2, 3, 0.75), (0, 3, 0.1)],
        );
        let out = collinearity_filter(&c, 0.7);
        let idx: Vec<usize> = out
            .kept
            .iter()
            .map(|n| c.names.iter().position(|x| x == n).unwrap())
            .collect();
        for (ai, &a) in idx.iter().enumerate() {
            for &b in idx.iter().skip(ai + 1) {
                assert!(c.values[(a, b)].abs() <= 0.7);
            }
        }
    }
}
