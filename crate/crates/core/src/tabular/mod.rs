//! Ingestion of delimiter-separated interaction recordings, and the inverse writer.
//!
//! A [`ColumnMapping`] says which column feeds which model field. Cells holding
//! `{k: v}` maps or `[a, b]` lists are parsed as structured values. When no activity
//! column is mapped, names are synthesized from the action type and the lowest target
//! id present (see [`crate::make_activity_name`]).

mod ingest;
mod literal;
mod mapping;
mod write;

pub use ingest::{ingest, ingest_reader, parse_timestamp, IngestReport, SkippedRow};
pub use literal::{format_cell, parse_cell, parse_list_literal, parse_map_literal, LiteralError};
pub use mapping::{infer_mapping, ColumnMapping, ExtrasPolicy, Field, NamingPreset, ValueParser};
pub use write::write_table;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("mapped column `{0}` is not in the header")]
    MissingColumn(String),
    #[error("no column yields an activity name, and no action type plus target column is mapped")]
    NoUsableColumns,
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
    #[error("unreadable table: {0}")]
    Csv(String),
}
