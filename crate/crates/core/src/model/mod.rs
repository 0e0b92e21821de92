//! In-memory reference model for user-interaction logs.
//!
//! Nine components make up the model: the activity (one [`InteractionEvent`]), its
//! [`Action`], the target object ([`TargetRef`]), the four levels of the UI hierarchy
//! (system, application, UI group, UI element, all stored in a [`UIHierarchy`]), and
//! the [`UserRef`] / [`TaskRef`] context components. Only the activity name is
//! mandatory; everything else is optional and every component carries an open
//! [`AttributeSet`].
//!
//! A [`UILog`] deliberately has no fixed case notion. Events live in one ordered
//! sequence and may optionally be partitioned into traces after the fact.

mod attribute;
mod event;
mod hierarchy;
mod log;
mod naming;

pub use attribute::{
    format_timestamp, truncate_millis, AttributeSet, AttributeValue, Timestamp,
    MAX_NESTING_DEPTH,
};
pub use event::{Action, InteractionEvent, TaskRef, UserRef, NONE_ACTION};
pub use hierarchy::{
    build_hierarchy, resolve_target, Associations, HierarchyNode, Level, NodeDecl, NodeId,
    TargetRef, UIHierarchy,
};
pub use log::{EventView, LogView, NodeView, OrderCheck, Trace, TraceView, UILog};
pub use naming::{make_activity_name, NamingScheme};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("empty {0}")]
    EmptyIdentifier(&'static str),
    #[error("attribute nesting depth {depth} exceeds the limit of {max}", max = MAX_NESTING_DEPTH)]
    NestingTooDeep { depth: usize },
    #[error("event carries no UI hierarchy association")]
    NoTarget,
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("parent cycle through node `{0}`")]
    CycleDetected(String),
    #[error("node `{node}` names unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },
    #[error("{level} `{node}` cannot be placed under a {parent_level}")]
    LevelViolation {
        node: String,
        level: Level,
        parent_level: Level,
    },
    #[error("duplicate {what} `{id}`")]
    DuplicateId { what: &'static str, id: String },
    #[error("event timestamp {timestamp} precedes the previous timestamp {previous}")]
    OutOfOrderTimestamp { timestamp: String, previous: String },
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),
}
