//! Assembly of the numeric design matrix from a dataset plus the
//! preprocessing outcomes.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::design::{ColumnMeta, DesignMatrix};
use crate::error::{Error, Result};
use crate::features::correlate::{collinearity_filter, pearson_matrix, CollinearityOutcome, DroppedCovariate};
use crate::features::encode::{
    encode_categoricals, BaselineClass, CategoricalEncoding, PrunedClass,
    DEFAULT_RARE_CLASS_THRESHOLD,
};
use crate::features::schema::{CovariateKind, Dataset, Transform};

pub const DEFAULT_COLLINEARITY_THRESHOLD: f64 = 0.7;

/// What preprocessing did to the covariate set, in plot-ready form.
#[derive(Debug, Clone, Serialize, Default)]
pub struct EncodingReport {
    pub dropped_collinear: Vec<DroppedCovariate>,
    pub baseline_classes: Vec<BaselineClass>,
    pub pruned_rare_classes: Vec<PrunedClass>,
    pub final_columns: Vec<String>,
    pub rows_used: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub collinearity_threshold: f64,
    pub rare_class_threshold: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            collinearity_threshold: DEFAULT_COLLINEARITY_THRESHOLD,
            rare_class_threshold: DEFAULT_RARE_CLASS_THRESHOLD,
        }
    }
}

/// A model-ready table: design matrix, response vector, provenance report,
/// and the dataset row index of each design row.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub design: DesignMatrix,
    pub response: DVector<f64>,
    pub report: EncodingReport,
    pub row_indices: Vec<usize>,
}

/// Runs the standard preprocessing chain: correlation pruning of continuous
/// covariates (when two or more), dummy coding of categorical covariates
/// (when present), then design assembly.
pub fn prepare_model(data: &Dataset, opts: &PipelineOptions) -> Result<PreparedModel> {
    let n_continuous = data.schema().continuous().count();
    let filter = if n_continuous >= 2 {
        Some(collinearity_filter(
            &pearson_matrix(data)?,
            opts.collinearity_threshold,
        ))
    } else {
        None
    };
    let encoding = if data.schema().categorical().count() > 0 {
        Some(encode_categoricals(data, opts.rare_class_threshold)?)
    } else {
        None
    };
    build_design(data, filter.as_ref(), encoding.as_ref())
}

/// Builds the intercept + continuous + dummy design.
///
/// `filter` restricts the continuous covariates to its survivors; `encoding`
/// supplies the dummy columns and the surviving rows. Either may be omitted.
pub fn build_design(
    data: &Dataset,
    filter: Option<&CollinearityOutcome>,
    encoding: Option<&CategoricalEncoding>,
) -> Result<PreparedModel> {
    let rows: Vec<usize> = match encoding {
        Some(enc) => enc.kept_rows.clone(),
        None => (0..data.n()).collect(),
    };
    let n = rows.len();

    let mut columns: Vec<ColumnMeta> = vec![ColumnMeta::intercept()];
    let mut values: Vec<DVector<f64>> = vec![DVector::from_element(n, 1.0)];

    for (idx, spec) in data.schema().continuous() {
        if let Some(f) = filter {
            if !f.kept.iter().any(|k| k == &spec.name) {
                continue;
            }
        }
        let mut col = DVector::zeros(n);
        let mut bad_rows = Vec::new();
        for (out_i, &row_i) in rows.iter().enumerate() {
            let raw = data.rows()[row_i].values[idx].as_number().expect("kind checked");
            if !spec.transform.valid_input(raw) {
                bad_rows.push(row_i);
            } else {
                col[out_i] = spec.transform.apply(raw);
            }
        }
        if !bad_rows.is_empty() {
            return Err(Error::data(format!(
                "log transform of covariate `{}` undefined for {} row(s): {}",
                spec.name,
                bad_rows.len(),
                preview_rows(&bad_rows)
            )));
        }
        columns.push(ColumnMeta::continuous(spec.name.clone(), spec.name.clone()));
        values.push(col);
    }

    if let Some(enc) = encoding {
        for dummy in &enc.dummies {
            let cov_idx = data
                .schema()
                .covariates
                .iter()
                .position(|c| c.name == dummy.covariate)
                .expect("encoding from same schema");
            let col = DVector::from_iterator(
                n,
                rows.iter().map(|&row_i| {
                    let class = data.rows()[row_i].values[cov_idx]
                        .as_class()
                        .expect("kind checked");
                    if class == dummy.class {
                        1.0
                    } else {
                        0.0
                    }
                }),
            );
            columns.push(ColumnMeta::dummy(dummy.column_name(), dummy.covariate.clone()));
            values.push(col);
        }
    }

    let response = DVector::from_iterator(
        n,
        rows.iter()
            .map(|&i| data.schema().response.transform.apply(data.rows()[i].response)),
    );

    let matrix = DMatrix::from_columns(&values);
    let design = DesignMatrix::new(matrix, columns)?;

    let report = EncodingReport {
        dropped_collinear: filter.map(|f| f.dropped.clone()).unwrap_or_default(),
        baseline_classes: encoding.map(|e| e.baselines.clone()).unwrap_or_default(),
        pruned_rare_classes: encoding.map(|e| e.pruned.clone()).unwrap_or_default(),
        final_columns: design.column_names().iter().map(|s| s.to_string()).collect(),
        rows_used: n,
    };

    Ok(PreparedModel {
        design,
        response,
        report,
        row_indices: rows,
    })
}

/// The pre-run model: intercept plus one 0/1 indicator per categorical
/// covariate marking membership in that covariate's modal class.
pub fn build_simple_model(data: &Dataset) -> Result<PreparedModel> {
    let categorical: Vec<_> = data.schema().categorical().collect();
    if categorical.is_empty() {
        return Err(Error::schema(
            "the simple model needs at least one categorical covariate",
        ));
    }

    let n = data.n();
    let mut columns = vec![ColumnMeta::intercept()];
    let mut values = vec![DVector::from_element(n, 1.0)];
    let mut baselines = Vec::new();

    for (idx, spec) in &categorical {
        let mut counts = std::collections::BTreeMap::new();
        for row in data.rows() {
            let class = row.values[*idx].as_class().expect("kind checked");
            *counts.entry(class).or_insert(0usize) += 1;
        }
        let (modal, modal_count) = counts
            .iter()
            .fold(None::<(&str, usize)>, |best, (&class, &count)| match best {
                Some((_, bc)) if bc >= count => best,
                _ => Some((class, count)),
            })
            .expect("dataset is non-empty");
        let modal = modal.to_string();
        let col = DVector::from_iterator(
            n,
            data.rows().iter().map(|row| {
                let class = row.values[*idx].as_class().expect("kind checked");
                if class == modal {
                    1.0
                } else {
                    0.0
                }
            }),
        );
        columns.push(ColumnMeta::dummy(
            format!("{}={}", spec.name, modal),
            spec.name.clone(),
        ));
        values.push(col);
        baselines.push(BaselineClass {
            covariate: spec.name.clone(),
            class: modal,
            count: modal_count,
        });
    }

    let response = DVector::from_iterator(
        n,
        data.rows()
            .iter()
            .map(|r| data.schema().response.transform.apply(r.response)),
    );
    let design = DesignMatrix::new(DMatrix::from_columns(&values), columns)?;
    let report = EncodingReport {
        dropped_collinear: Vec::new(),
        baseline_classes: baselines,
        pruned_rare_classes: Vec::new(),
        final_columns: design.column_names().iter().map(|s| s.to_string()).collect(),
        rows_used: n,
    };
    Ok(PreparedModel {
        design,
        response,
        report,
        row_indices: (0..n).collect(),
    })
}

fn preview_rows(rows: &[usize]) -> String {
    const SHOW: usize = 10;
    let shown: Vec<String> = rows.iter().take(SHOW).map(|r| r.to_string()).collect();
    if rows.len() > SHOW {
        format!("[{}, ... and {} more]", shown.join(", "), rows.len() - SHOW)
    } else {
        format!("[{}]", shown.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::schema::{
        CovariateSchema, CovariateSpec, Observation, ResponseSpec, Value,
    };

    fn mixed_dataset() -> Dataset {
        let schema = CovariateSchema {
            response: ResponseSpec {
                name: "y".into(),
                transform: Transform::None,
            },
            covariates: vec![
                CovariateSpec {
                    name: "a".into(),
                    kind: CovariateKind::Continuous,
                    transform: Transform::None,
                },
                CovariateSpec {
                    name: "b".into(),
                    kind: CovariateKind::Continuous,
                    transform: Transform::None,
                },
                CovariateSpec {
                    name: "c".into(),
                    kind: CovariateKind::Continuous,
                    transform: Transform::None,
                },
                CovariateSpec {
                    name: "landuse".into(),
                    kind: CovariateKind::Categorical,
                    transform: Transform::None,
                },
            ],
        };
        let classes = ["A", "B", "C", "D", "E"];
        let rows: Vec<Observation> = (0..100)
            .map(|i| Observation {
                response: (i % 13) as f64 + 0.5,
                values: vec![
                    Value::Number((i as f64 * 0.37).sin()),
                    Value::Number((i as f64 * 0.11).cos()),
                    Value::Number(((i * i) % 29) as f64 / 29.0),
                    Value::Class(classes[i % classes.len()].to_string()),
                ],
            })
            .collect();
        Dataset::new(schema, rows).unwrap()
    }

    #[test]
    fn column_arithmetic_matches() {
        // 3 continuous + 1 categorical with 5 equally common classes: the
        // lexicographically smallest is baseline, leaving 4 dummy columns,
        // so p + 1 = 8.
        let data = mixed_dataset();
        let enc = encode_categoricals(&data, 5).unwrap();
        let model = build_design(&data, None, Some(&enc)).unwrap();
        assert_eq!(model.design.ncols(), 8);
        assert_eq!(model.report.final_columns[0], "(Intercept)");
        assert!(model.report.final_columns.contains(&"landuse=B".to_string()));
        assert!(!model.report.final_columns.contains(&"landuse=A".to_string()));
    }

    #[test]
    fn dummy_rows_sum_to_at_most_one_per_covariate() {
        let data = mixed_dataset();
        let enc = encode_categoricals(&data, 5).unwrap();
        let model = build_design(&data, None, Some(&enc)).unwrap();
        let dummy_cols: Vec<usize> = (0..model.design.ncols())
            .filter(|&j| model.design.columns()[j].kind == crate::design::ColumnKind::Dummy)
            .collect();
        for i in 0..model.design.nrows() {
            let sum: f64 = dummy_cols
                .iter()
                .map(|&j| model.design.values()[(i, j)])
                .sum();
            assert!(sum <= 1.0);
        }
    }

    #[test]
    fn log_response_is_applied() {
        let schema = CovariateSchema {
            response: ResponseSpec {
                name: "y".into(),
                transform: Transform::Log,
            },
            covariates: vec![CovariateSpec {
                name: "x".into(),
                kind: CovariateKind::Continuous,
                transform: Transform::None,
            }],
        };
        let rows = vec![
            Observation {
                response: 10.0,
                values: vec![Value::Number(0.0)],
            },
            Observation {
                response: 100.0,
                values: vec![Value::Number(1.0)],
            },
        ];
        let data = Dataset::new(schema, rows).unwrap();
        let model = build_design(&data, None, None).unwrap();
        assert_eq!(model.response[0], 10.0f64.ln());
        assert_eq!(model.response[1], 100.0f64.ln());
    }

    #[test]
    fn log_covariate_domain_violation_lists_rows() {
        let schema = CovariateSchema {
            response: ResponseSpec {
                name: "y".into(),
                transform: Transform::None,
            },
            covariates: vec![
                CovariateSpec {
                    name: "x".into(),
                    kind: CovariateKind::Continuous,
                    transform: Transform::Log,
                },
                CovariateSpec {
                    name: "w".into(),
                    kind: CovariateKind::Continuous,
                    transform: Transform::None,
                },
            ],
        };
        let rows = vec![
            Observation {
                response: 1.0,
                values: vec![Value::Number(2.0), Value::Number(0.3)],
            },
            Observation {
                response: 2.0,
                values: vec![Value::Number(-1.0), Value::Number(0.9)],
            },
            Observation {
                response: 3.0,
                values: vec![Value::Number(4.0), Value::Number(1.1)],
            },
        ];
        let data = Dataset::new(schema, rows).unwrap();
        let err = build_design(&data, None, None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`x`") && msg.contains("[1]"), "{msg}");
    }

    #[test]
    fn deterministic_given_identical_input() {
        let data = mixed_dataset();
        let enc = encode_categoricals(&data, 5).unwrap();
        let a = build_design(&data, None, Some(&enc)).unwrap();
        let b = build_design(&data, None, Some(&enc)).unwrap();
        assert_eq!(a.design.values(), b.design.values());
        assert_eq!(a.response, b.response);
    }

    #[test]
    fn simple_model_has_one_indicator_per_covariate() {
        let schema = CovariateSchema {
            response: ResponseSpec {
                name: "y".into(),
                transform: Transform::None,
            },
            covariates: (0..3)
                .map(|k| CovariateSpec {
                    name: format!("cat{k}"),
                    kind: CovariateKind::Categorical,
                    transform: Transform::None,
                })
                .collect(),
        };
        let class_sets = [["P", "Q"], ["R", "S"], ["T", "U"]];
        let rows: Vec<Observation> = (0..60)
            .map(|i| Observation {
                response: i as f64,
                values: (0..3)
                    .map(|k| Value::Class(class_sets[k][(i + k) % 2].to_string()))
                    .collect(),
            })
            .collect();
        let data = Dataset::new(schema, rows).unwrap();
        let model = build_simple_model(&data).unwrap();
        assert_eq!(model.design.ncols(), 4);
    }

    #[test]
    fn simple_model_all_modal_rows_is_rank_error() {
        let schema = CovariateSchema {
            response: ResponseSpec {
                name: "y".into(),
                transform: Transform::None,
            },
            covariates: vec![CovariateSpec {
                name: "cat".into(),
                kind: CovariateKind::Categorical,
                transform: Transform::None,
            }],
        };
        let rows: Vec<Observation> = (0..20)
            .map(|i| Observation {
                response: i as f64,
                values: vec![Value::Class("only".into())],
            })
            .collect();
        let data = Dataset::new(schema, rows).unwrap();
        let err = build_simple_model(&data).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }), "{err}");
    }
}
