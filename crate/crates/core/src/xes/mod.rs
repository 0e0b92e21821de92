//! XES interchange with the `uilog` extension.
//!
//! XES has a fixed log/trace/event shape with flat event attributes, so the
//! hierarchy context of every event is repeated on that event. Nested UI groups are
//! flattened into `uilog:ui-group-path` (see [`crate::path`]). A log without traces
//! is written as one trace and flagged with the log attribute `uilog:untraced`.
//!
//! ```
//! use uilog::xes::{read_xes, write_xes};
//! use uilog::{InteractionEvent, OrderCheck, UILog};
//!
//! let mut log = UILog::new();
//! log.append_event(InteractionEvent::new("A_Login").with_action("none"), OrderCheck::Strict)
//!     .unwrap();
//! let xml = write_xes(&log).unwrap();
//! assert!(xml.contains(r#"<string key="uilog:action-type" value="none"/>"#));
//! assert_eq!(read_xes(&xml).unwrap().view(), log.view());
//! ```

mod convert;
pub mod document;
mod extension;
pub mod keys;

pub use convert::{document_to_log, log_to_document, ReadOptions};
pub use document::{XesAttribute, XesDocument, XesEvent, XesTrace, XesValue};
pub use extension::emit_extension_definition;

use thiserror::Error;

use crate::model::UILog;
use crate::validation::{validate, ValidationReport};

#[derive(Debug, Clone, Error)]
pub enum XesError {
    #[error("malformed XES document: {0}")]
    MalformedDocument(String),
    #[error("event {event} of trace {trace} has no concept:name")]
    MissingConceptName { trace: usize, event: usize },
    #[error("log fails validation with {} violation(s)", .0.violations.len())]
    InvalidLog(ValidationReport),
    #[error("value cannot be serialized: {0}")]
    UnserializableValue(String),
    #[error("reserved key used as a plain attribute: {0}")]
    ReservedKey(String),
}

/// Serializes a log that passes validation.
pub fn write_xes(log: &UILog) -> Result<String, XesError> {
    let report = validate(log);
    if !report.is_valid() {
        return Err(XesError::InvalidLog(report));
    }
    write_xes_unchecked(log)
}

/// Serializes without running validation. Structural problems that make the log
/// unrepresentable (dangling targets, over-deep values, reserved keys) still fail;
/// softer breaches such as out-of-order timestamps are written as they are.
pub fn write_xes_unchecked(log: &UILog) -> Result<String, XesError> {
    document::serialize(&log_to_document(log)?)
}

/// Result of a read: the log plus non-fatal reader findings.
#[derive(Debug, Clone)]
pub struct XesRead {
    pub log: UILog,
    pub warnings: Vec<String>,
}

pub fn read_xes(xml: &str) -> Result<UILog, XesError> {
    read_xes_with(xml, &ReadOptions::default()).map(|r| r.log)
}

pub fn read_xes_with(xml: &str, options: &ReadOptions) -> Result<XesRead, XesError> {
    let parsed = document::parse(xml)?;
    let (log, mut warnings) = document_to_log(&parsed.document, options)?;
    let mut all = parsed.warnings;
    all.append(&mut warnings);
    Ok(XesRead {
        log,
        warnings: all,
    })
}
