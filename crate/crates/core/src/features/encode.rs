//! Dummy coding of categorical covariates with rare-class pruning and a
//! modal baseline.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::schema::Dataset;

pub const DEFAULT_RARE_CLASS_THRESHOLD: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct PrunedClass {
    pub covariate: String,
    pub class: String,
    /// Occurrences in the input table.
    pub count: usize,
    /// Rows removed and attributed to this class (each removed row is
    /// attributed to the pruned class of its first categorical covariate,
    /// so these sum to the total rows removed).
    pub rows_removed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineClass {
    pub covariate: String,
    pub class: String,
    /// Occurrences among the surviving rows.
    pub count: usize,
}

/// One 0/1 design column: membership of `covariate` in `class`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DummyColumn {
    pub covariate: String,
    pub class: String,
}

impl DummyColumn {
    pub fn column_name(&self) -> String {
        format!("{}={}", self.covariate, self.class)
    }
}

/// Output of categorical encoding: which rows survive pruning and which
/// dummy columns the design will carry.
#[derive(Debug, Clone)]
pub struct CategoricalEncoding {
    /// Surviving row indices into the dataset, ascending.
    pub kept_rows: Vec<usize>,
    /// Dummy columns: covariates in schema order, classes in lexicographic
    /// order, baseline omitted.
    pub dummies: Vec<DummyColumn>,
    pub baselines: Vec<BaselineClass>,
    pub pruned: Vec<PrunedClass>,
}

/// Encodes every categorical covariate.
///
/// Classes with `count <= rare_threshold` occurrences (counted on the input
/// table) are pruned and their rows removed; the modal class of each
/// covariate (ties to the lexicographically smallest) becomes the baseline
/// carried by the intercept.
pub fn encode_categoricals(
    data: &Dataset,
    rare_threshold: usize,
) -> Result<CategoricalEncoding> {
    let categorical: Vec<_> = data.schema().categorical().collect();
    if categorical.is_empty() {
        return Err(Error::schema("no categorical covariates to encode"));
    }

    // Class counts on the full input table decide pruning.
    let full_counts: Vec<BTreeMap<&str, usize>> = categorical
        .iter()
        .map(|(idx, _)| class_counts(data, *idx))
        .collect();

    let pruned_sets: Vec<Vec<&str>> = full_counts
        .iter()
        .map(|counts| {
            counts
                .iter()
                .filter(|(_, &c)| c <= rare_threshold)
                .map(|(&class, _)| class)
                .collect()
        })
        .collect();

    let mut pruned: Vec<PrunedClass> = Vec::new();
    for ((_, spec), (counts, pruned_classes)) in
        categorical.iter().zip(full_counts.iter().zip(&pruned_sets))
    {
        for class in pruned_classes {
            pruned.push(PrunedClass {
                covariate: spec.name.clone(),
                class: class.to_string(),
                count: counts[class],
                rows_removed: 0,
            });
        }
    }

    let mut kept_rows = Vec::with_capacity(data.n());
    for (i, row) in data.rows().iter().enumerate() {
        let mut removed_by: Option<(usize, &str)> = None;
        for (k, (idx, _)) in categorical.iter().enumerate() {
            let class = row.values[*idx].as_class().expect("kind checked");
            if pruned_sets[k].iter().any(|&p| p == class) {
                removed_by = Some((k, class));
                break;
            }
        }
        match removed_by {
            None => kept_rows.push(i),
            Some((k, class)) => {
                let spec_name = &categorical[k].1.name;
                let entry = pruned
                    .iter_mut()
                    .find(|p| p.covariate == *spec_name && p.class == class)
                    .expect("pruned class recorded");
                entry.rows_removed += 1;
            }
        }
    }
    if kept_rows.is_empty() {
        return Err(Error::data(
            "rare-class pruning removed every row; lower the threshold",
        ));
    }

    // Baselines and dummy columns come from the surviving rows.
    let mut baselines = Vec::new();
    let mut dummies = Vec::new();
    for (idx, spec) in &categorical {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for &i in &kept_rows {
            let class = data.rows()[i].values[*idx].as_class().expect("kind checked");
            *counts.entry(class).or_insert(0) += 1;
        }
        if counts.len() < 2 {
            return Err(Error::data(format!(
                "categorical covariate `{}` has a single class after pruning; no contrast is possible",
                spec.name
            )));
        }
        // BTreeMap iterates lexicographically, so the first maximal count is
        // the lexicographically smallest modal class.
        let (modal, modal_count) = counts
            .iter()
            .fold(None::<(&str, usize)>, |best, (&class, &count)| match best {
                Some((_, bc)) if bc >= count => best,
                _ => Some((class, count)),
            })
            .expect("at least two classes");
        baselines.push(BaselineClass {
            covariate: spec.name.clone(),
            class: modal.to_string(),
            count: modal_count,
        });
        for (&class, _) in counts.iter().filter(|(&c, _)| c != modal) {
            dummies.push(DummyColumn {
                covariate: spec.name.clone(),
                class: class.to_string(),
            });
        }
    }

    Ok(CategoricalEncoding {
        kept_rows,
        dummies,
        baselines,
        pruned,
    })
}

fn class_counts<'a>(data: &'a Dataset, covariate_index: usize) -> BTreeMap<&'a str, usize> {
    let mut counts = BTreeMap::new();
    for row in data.rows() {
        let class = row.values[covariate_index].as_class().expect("kind checked");
        *counts.entry(class).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::schema::{
        CovariateKind, CovariateSchema, CovariateSpec, Observation, ResponseSpec, Transform, Value,
    };

    fn one_cat_dataset(classes: &[(&str, usize)]) -> Dataset {
        let schema = CovariateSchema {
            response: ResponseSpec {
                name: "y".into(),
                transform: Transform::None,
            },
            covariates: vec![CovariateSpec {
                name: "landuse".into(),
                kind: CovariateKind::Categorical,
                transform: Transform::None,
            }],
        };
        let mut rows = Vec::new();
        for &(class, count) in classes {
            for _ in 0..count {
                rows.push(Observation {
                    response: 1.0,
                    values: vec![Value::Class(class.to_string())],
                });
            }
        }
        Dataset::new(schema, rows).unwrap()
    }

    #[test]
    fn prunes_rare_and_baselines_modal() {
        let data = one_cat_dataset(&[("A", 100), ("B", 50), ("C", 3)]);
        let enc = encode_categoricals(&data, 5).unwrap();
        assert_eq!(enc.kept_rows.len(), 150);
        assert_eq!(enc.dummies.len(), 1);
        assert_eq!(enc.dummies[0].column_name(), "landuse=B");
        assert_eq!(enc.baselines[0].class, "A");
        assert_eq!(enc.pruned.len(), 1);
        assert_eq!(enc.pruned[0].class, "C");
        assert_eq!(enc.pruned[0].count, 3);
        assert_eq!(enc.pruned[0].rows_removed, 3);
    }

    #[test]
    fn binary_covariate_gets_single_contrast() {
        let data = one_cat_dataset(&[("A", 60), ("B", 40)]);
        let enc = encode_categoricals(&data, 5).unwrap();
        assert_eq!(enc.dummies.len(), 1);
        assert_eq!(enc.dummies[0].class, "B");
    }

    #[test]
    fn modal_tie_breaks_lexicographically() {
        let data = one_cat_dataset(&[("B", 50), ("A", 50)]);
        let enc = encode_categoricals(&data, 5).unwrap();
        assert_eq!(enc.baselines[0].class, "A");
        assert_eq!(enc.dummies[0].class, "B");
    }

    #[test]
    fn single_class_is_an_error() {
        let data = one_cat_dataset(&[("A", 30)]);
        let err = encode_categoricals(&data, 5).unwrap_err();
        assert!(err.to_string().contains("landuse"), "{err}");
    }

    #[test]
    fn row_accounting_is_exact() {
        let data = one_cat_dataset(&[("A", 40), ("B", 5), ("C", 2), ("D", 9)]);
        let enc = encode_categoricals(&data, 5).unwrap();
        let removed: usize = enc.pruned.iter().map(|p| p.rows_removed).sum();
        assert_eq!(enc.kept_rows.len() + removed, data.n());
        assert_eq!(removed, 7);
    }
}
