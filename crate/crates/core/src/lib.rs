//! Reference data model for process-related user-interaction (UI) logs.
//!
//! The crate provides the in-memory [`model`], invariant checking and coverage
//! statistics ([`validation`], [`stats`]), XES interchange with the `uilog`
//! extension ([`xes`]), ingestion of delimiter-separated recordings ([`tabular`]),
//! and the two transforms that depend on the point of instantiation: case
//! segmentation and UI-group-based abstraction ([`transform`]).

pub mod model;
pub mod path;
pub mod stats;
pub mod tabular;
pub mod transform;
pub mod validation;
pub mod xes;

#[cfg(feature = "testing")]
pub mod testing;

pub use model::{
    make_activity_name, resolve_target, Action, Associations, AttributeSet, AttributeValue,
    InteractionEvent, Level, ModelError, NamingScheme, OrderCheck, TargetRef, Timestamp, Trace,
    UIHierarchy, UILog,
};
pub use validation::{validate, ValidationReport, Violation, ViolationCode};
