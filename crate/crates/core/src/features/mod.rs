//! Ingestion and preprocessing: observation tables, correlation pruning,
//! dummy coding, and design assembly.

mod build;
mod correlate;
mod encode;
mod schema;
mod table;

pub use build::{
    build_design, build_simple_model, prepare_model, EncodingReport, PipelineOptions,
    PreparedModel, DEFAULT_COLLINEARITY_THRESHOLD,
};
pub use correlate::{collinearity_filter, pearson_matrix, CollinearityOutcome, CorrelationMatrix, DroppedCovariate};
pub use encode::{
    encode_categoricals, BaselineClass, CategoricalEncoding, DummyColumn, PrunedClass,
    DEFAULT_RARE_CLASS_THRESHOLD,
};
pub use schema::{
    CovariateKind, CovariateSchema, CovariateSpec, Dataset, Observation, ResponseSpec, Transform,
    Value,
};
pub use table::{load_csv, read_csv, LoadReport};
