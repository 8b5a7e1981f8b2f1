//! Tabular ingestion, splitting and minibatch construction.

mod batch;
mod dataset;
mod schema;

pub use batch::{marginal_of_a, minibatch_construct, EmpiricalMarginal, Minibatch, SamplerKind};
pub use dataset::{
    load_csv, load_csv_reader, split_train_val, AttrKind, FeatureScaler, OutcomeKind, SensitiveAttr, SensitiveColumn,
    TabularDataset,
};
pub use schema::{ColumnSchema, Kind, Role, Schema};
