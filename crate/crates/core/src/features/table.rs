//! CSV ingestion: header-matched, comma-separated, "." decimal point.
//! Empty fields are missing values; a row missing any modeled field is
//! dropped and counted.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::schema::{CovariateKind, CovariateSchema, Dataset, Observation, Value};

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadReport {
    pub rows_loaded: usize,
    pub rows_dropped_missing: usize,
}

pub fn load_csv(path: &Path, schema: &CovariateSchema) -> Result<(Dataset, LoadReport)> {
    let file = File::open(path).map_err(|e| {
        Error::data(format!("cannot open `{}`: {e}", path.display()))
    })?;
    read_csv(file, schema)
}

pub fn read_csv<R: Read>(reader: R, schema: &CovariateSchema) -> Result<(Dataset, LoadReport)> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let column_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::schema(format!("column `{name}` not found in CSV header")))
    };

    let response_idx = column_index(&schema.response.name)?;
    let covariate_idx: Vec<usize> = schema
        .covariates
        .iter()
        .map(|c| column_index(&c.name))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let data_row = line + 1; // 1-based, excluding the header

        let field = |idx: usize| record.get(idx).unwrap_or("");
        let missing = field(response_idx).is_empty()
            || covariate_idx.iter().any(|&i| field(i).is_empty());
        if missing {
            dropped += 1;
            continue;
        }

        let response = parse_number(field(response_idx), &schema.response.name, data_row)?;
        let mut values = Vec::with_capacity(schema.covariates.len());
        for (spec, &idx) in schema.covariates.iter().zip(&covariate_idx) {
            let raw = field(idx);
            match spec.kind {
                CovariateKind::Continuous => {
                    values.push(Value::Number(parse_number(raw, &spec.name, data_row)?))
                }
                CovariateKind::Categorical => values.push(Value::Class(raw.to_string())),
            }
        }
        rows.push(Observation { response, values });
    }

    if rows.is_empty() {
        return Err(Error::data("no usable rows in input table"));
    }
    let report = LoadReport {
        rows_loaded: rows.len(),
        rows_dropped_missing: dropped,
    };
    Ok((Dataset::new(schema.clone(), rows)?, report))
}

fn parse_number(raw: &str, column: &str, row: usize) -> Result<f64> {
    raw.parse::<f64>().map_err(|_| {
        Error::data(format!(
            "cannot parse `{raw}` as a number (column `{column}`, data row {row})"
        ))
    })
}
