//! Attribute keys of the `uilog` XES extension. Keys are case-sensitive and fixed.

pub const PREFIX: &str = "uilog";
pub const EXTENSION_NAME: &str = "UILog";
pub const EXTENSION_URI: &str = "urn:uilog:xes-extension:1.0";

pub const ACTION_TYPE: &str = "uilog:action-type";
pub const INPUT_VALUE: &str = "uilog:input-value";
pub const UI_ELEMENT: &str = "uilog:ui-element";
pub const UI_ELEMENT_STATE: &str = "uilog:ui-element-state";
pub const UI_GROUP_PATH: &str = "uilog:ui-group-path";
pub const APPLICATION: &str = "uilog:application";
pub const SYSTEM: &str = "uilog:system";
pub const USER: &str = "uilog:user";
pub const TASK: &str = "uilog:task";

/// Event-level keys, in the order the writer emits them.
pub const EVENT_KEYS: [&str; 9] = [
    ACTION_TYPE,
    INPUT_VALUE,
    UI_ELEMENT,
    UI_ELEMENT_STATE,
    UI_GROUP_PATH,
    APPLICATION,
    SYSTEM,
    USER,
    TASK,
];

/// Log-level marker: the single trace was added by the writer and is not a case.
pub const UNTRACED: &str = "uilog:untraced";

pub const CONCEPT_NAME: &str = "concept:name";
pub const TIME_TIMESTAMP: &str = "time:timestamp";

pub const CONCEPT_URI: &str = "http://www.xes-standard.org/concept.xesext";
pub const TIME_URI: &str = "http://www.xes-standard.org/time.xesext";

/// Keys the model owns; user attributes may not use them.
pub fn is_reserved(key: &str) -> bool {
    key == CONCEPT_NAME || key == TIME_TIMESTAMP || key.starts_with("uilog:")
}
