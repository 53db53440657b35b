//! Observation tables and their declared schema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    None,
    Log,
}

impl Transform {
    /// Applies the transform; caller is responsible for domain checks.
    pub fn apply(self, value: f64) -> f64 {
        match self {
            Transform::None => value,
            Transform::Log => value.ln(),
        }
    }

    pub fn valid_input(self, value: f64) -> bool {
        match self {
            Transform::None => value.is_finite(),
            Transform::Log => value.is_finite() && value > 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CovariateKind {
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariateSpec {
    pub name: String,
    pub kind: CovariateKind,
    #[serde(default)]
    pub transform: Transform,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResponseSpec {
    pub name: String,
    #[serde(default)]
    pub transform: Transform,
}

/// Declares the response and covariates of an observation table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariateSchema {
    pub response: ResponseSpec,
    pub covariates: Vec<CovariateSpec>,
}

impl CovariateSchema {
    pub fn validate(&self) -> Result<()> {
        if self.covariates.is_empty() {
            return Err(Error::schema("at least one covariate is required"));
        }
        let mut names: Vec<&str> = self.covariates.iter().map(|c| c.name.as_str()).collect();
        names.push(&self.response.name);
        let mut sorted = names.clone();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::schema(format!("duplicate name `{}`", pair[0])));
            }
        }
        for c in &self.covariates {
            if c.kind == CovariateKind::Categorical && c.transform != Transform::None {
                return Err(Error::schema(format!(
                    "categorical covariate `{}` cannot be transformed",
                    c.name
                )));
            }
        }
        Ok(())
    }

    pub fn continuous(&self) -> impl Iterator<Item = (usize, &CovariateSpec)> {
        self.covariates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == CovariateKind::Continuous)
    }

    pub fn categorical(&self) -> impl Iterator<Item = (usize, &CovariateSpec)> {
        self.covariates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == CovariateKind::Categorical)
    }
}

/// One covariate value; variant must match the declared kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Class(String),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Class(_) => None,
        }
    }

    pub fn as_class(&self) -> Option<&str> {
        match self {
            Value::Class(c) => Some(c),
            Value::Number(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Observation {
    pub response: f64,
    /// Covariate values aligned with the schema's covariate order.
    pub values: Vec<Value>,
}

/// A validated observation table.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: CovariateSchema,
    rows: Vec<Observation>,
}

impl Dataset {
    pub fn new(schema: CovariateSchema, rows: Vec<Observation>) -> Result<Self> {
        schema.validate()?;
        for (i, row) in rows.iter().enumerate() {
            if row.values.len() != schema.covariates.len() {
                return Err(Error::Dimension {
                    what: format!("covariate values in row {i}"),
                    expected: schema.covariates.len(),
                    got: row.values.len(),
                });
            }
            if !row.response.is_finite() {
                return Err(Error::data(format!("non-finite response in row {i}")));
            }
            if !schema.response.transform.valid_input(row.response) {
                return Err(Error::data(format!(
                    "response in row {i} is {}, incompatible with the declared log transform",
                    row.response
                )));
            }
            for (spec, value) in schema.covariates.iter().zip(&row.values) {
                match (spec.kind, value) {
                    (CovariateKind::Continuous, Value::Number(v)) => {
                        if !v.is_finite() {
                            return Err(Error::data(format!(
                                "non-finite value for `{}` in row {i}",
                                spec.name
                            )));
                        }
                    }
                    (CovariateKind::Categorical, Value::Class(_)) => {}
                    _ => {
                        return Err(Error::data(format!(
                            "value for `{}` in row {i} does not match its declared kind",
                            spec.name
                        )));
                    }
                }
            }
        }
        Ok(Dataset { schema, rows })
    }

    pub fn schema(&self) -> &CovariateSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Raw (untransformed) values of one continuous covariate.
    pub fn continuous_values(&self, covariate_index: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.values[covariate_index].as_number().expect("kind checked"))
            .collect()
    }
}
