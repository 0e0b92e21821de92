//! Transforms that depend on how a log is instantiated: grouping events into cases
//! ([`segment`], [`flatten`]) and collapsing low-level work inside a UI group into a
//! single task-level event ([`abstract_events`]).

mod abstraction;
mod segment;

pub use abstraction::{abstract_events, AbstractionRule, AbstractionWarning, Abstracted, RuleSet};
pub use segment::{flatten, segment, CaseNotion};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("{} event(s) lack case attribute `{key}` (first: #{})", .events.len(), .events[0])]
    MissingCaseAttribute { key: String, events: Vec<usize> },
    #[error("{} event(s) have no timestamp (first: #{})", .events.len(), .events[0])]
    MissingTimestamps { events: Vec<usize> },
    #[error("no UI group `{0}` in the hierarchy")]
    UnknownGroup(String),
    #[error("invalid case notion: {0}")]
    InvalidNotion(String),
    #[error("invalid abstraction rule: {0}")]
    InvalidRule(String),
}
