use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::NamingScheme;

/// Model fields a column can feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    ActivityName,
    ActionType,
    UiElement,
    UiGroupPath,
    Application,
    System,
    InputValue,
    CurrentState,
    Timestamp,
    User,
    Task,
    /// Case identifier; rows sharing it form one trace.
    TraceId,
}

impl Field {
    pub const ALL: [Field; 12] = [
        Field::ActivityName,
        Field::ActionType,
        Field::UiElement,
        Field::UiGroupPath,
        Field::Application,
        Field::System,
        Field::InputValue,
        Field::CurrentState,
        Field::Timestamp,
        Field::User,
        Field::Task,
        Field::TraceId,
    ];

    /// Column header used when writing with [`ColumnMapping::canonical`].
    pub fn default_header(self) -> &'static str {
        match self {
            Field::ActivityName => "Activity",
            Field::ActionType => "Action type",
            Field::UiElement => "UI element",
            Field::UiGroupPath => "UI group",
            Field::Application => "Application",
            Field::System => "System",
            Field::InputValue => "Input value",
            Field::CurrentState => "Current state",
            Field::Timestamp => "Timestamp",
            Field::User => "User",
            Field::Task => "Task",
            Field::TraceId => "Trace",
        }
    }

    /// Normalized header spellings recognized by [`infer_mapping`].
    fn synonyms(self) -> &'static [&'static str] {
        match self {
            Field::ActivityName => &["activity", "activityname", "conceptname", "eventname", "label"],
            Field::ActionType => &["actiontype", "action", "eventtype", "interactiontype"],
            Field::UiElement => &["uielement", "element", "target", "targetelement", "widget", "control"],
            Field::UiGroupPath => &["uigroup", "uigrouppath", "group", "grouppath", "uihierarchy"],
            Field::Application => &["app", "application", "appname", "applicationname", "program"],
            Field::System => &["system", "host", "hostname", "machine"],
            Field::InputValue => &["inputvalue", "input", "value"],
            Field::CurrentState => &["currentstate", "state", "elementstate"],
            Field::Timestamp => &["time", "timestamp", "datetime", "date", "timetimestamp"],
            Field::User => &["user", "userid", "username", "resource"],
            Field::Task => &["task", "taskid", "routine"],
            Field::TraceId => &["trace", "traceid", "case", "caseid", "session", "sessionid"],
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Field::ActivityName => "activity_name",
            Field::ActionType => "action_type",
            Field::UiElement => "ui_element",
            Field::UiGroupPath => "ui_group_path",
            Field::Application => "application",
            Field::System => "system",
            Field::InputValue => "input_value",
            Field::CurrentState => "current_state",
            Field::Timestamp => "timestamp",
            Field::User => "user",
            Field::Task => "task",
            Field::TraceId => "trace_id",
        }
    }

    fn is_target(self) -> bool {
        matches!(
            self,
            Field::UiElement | Field::UiGroupPath | Field::Application | Field::System
        )
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a cell becomes an attribute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ValueParser {
    #[default]
    Plain,
    /// `{k: v, k: v}`
    MapLiteral,
    /// `[v, v]`
    ListLiteral,
    /// Map or list literal when the cell is bracketed, plain text otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExtrasPolicy {
    Ignore,
    #[default]
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NamingPreset {
    /// `<action type> <target id>`
    #[default]
    Concatenate,
    /// Like `Concatenate`, abbreviating left/right clicks to `click`/`rclick`.
    Abbreviated,
}

/// Declarative mapping from table columns to model fields.
///
/// Serialized as TOML:
///
/// ```toml
/// delimiter = ","
/// timestamp_format = "%Y-%m-%d %H:%M:%S%.3f"
/// extras = "keep"
/// naming = "abbreviated"
///
/// [columns]
/// action_type = "Action type"
/// ui_element = "UI element"
///
/// [parsers]
/// "Current state" = "list_literal"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMapping {
    pub columns: BTreeMap<Field, String>,
    /// chrono format string. Unset means RFC 3339.
    pub timestamp_format: Option<String>,
    /// Per column name. Unlisted input-value and current-state columns use `auto`,
    /// everything else `plain`.
    pub parsers: IndexMap<String, ValueParser>,
    pub extras: ExtrasPolicy,
    pub delimiter: String,
    pub naming: NamingPreset,
    /// Extra action-type rewrites applied when synthesizing names.
    pub rewrites: IndexMap<String, String>,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        ColumnMapping {
            columns: BTreeMap::new(),
            timestamp_format: None,
            parsers: IndexMap::new(),
            extras: ExtrasPolicy::Keep,
            delimiter: ",".into(),
            naming: NamingPreset::Concatenate,
            rewrites: IndexMap::new(),
        }
    }
}

impl ColumnMapping {
    /// Every field mapped to its default header; what the writer uses by default.
    pub fn canonical() -> Self {
        ColumnMapping {
            columns: Field::ALL
                .iter()
                .map(|&f| (f, f.default_header().to_string()))
                .collect(),
            ..Default::default()
        }
    }

    pub fn with_column(mut self, field: Field, column: impl Into<String>) -> Self {
        self.columns.insert(field, column.into());
        self
    }

    pub fn column(&self, field: Field) -> Option<&str> {
        self.columns.get(&field).map(String::as_str)
    }

    pub fn parser_for(&self, field: Field) -> ValueParser {
        let explicit = self.column(field).and_then(|c| self.parsers.get(c)).copied();
        explicit.unwrap_or(match field {
            Field::InputValue | Field::CurrentState => ValueParser::Auto,
            _ => ValueParser::Plain,
        })
    }

    pub fn naming_scheme(&self) -> NamingScheme {
        let mut scheme = match self.naming {
            NamingPreset::Concatenate => NamingScheme::default(),
            NamingPreset::Abbreviated => NamingScheme::abbreviated(),
        };
        for (k, v) in &self.rewrites {
            scheme.rewrites.insert(k.clone(), v.clone());
        }
        scheme
    }

    pub fn delimiter_byte(&self) -> Result<u8, IngestError> {
        match self.delimiter.as_str() {
            "tab" | "\\t" | "\t" => Ok(b'\t'),
            "comma" => Ok(b','),
            "semicolon" => Ok(b';'),
            d if d.len() == 1 && d.is_ascii() => Ok(d.as_bytes()[0]),
            d => Err(IngestError::InvalidMapping(format!(
                "delimiter must be one ASCII character, got `{d}`"
            ))),
        }
    }

    /// Activity names must be obtainable: either mapped directly, or synthesized
    /// from a mapped action type plus at least one target column.
    pub fn check(&self) -> Result<(), IngestError> {
        let has_name = self.columns.contains_key(&Field::ActivityName);
        let can_synthesize = self.columns.contains_key(&Field::ActionType)
            && self.columns.keys().any(|f| f.is_target());
        if !has_name && !can_synthesize {
            return Err(IngestError::NoUsableColumns);
        }
        self.delimiter_byte()?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, IngestError> {
        let mapping: ColumnMapping =
            toml::from_str(text).map_err(|e| IngestError::InvalidMapping(e.to_string()))?;
        mapping.check()?;
        Ok(mapping)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("mapping serializes")
    }
}

fn normalize(header: &str) -> String {
    header
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Guesses a mapping from header names using a synonym table. Matching is
/// case-insensitive and ignores spaces and punctuation; the first column matching a
/// field wins. Unmatched columns fall under the extras policy.
pub fn infer_mapping<S: AsRef<str>>(header: &[S]) -> Result<ColumnMapping, IngestError> {
    if header.is_empty() {
        return Err(IngestError::NoUsableColumns);
    }
    let mut mapping = ColumnMapping::default();
    for column in header {
        let norm = normalize(column.as_ref());
        if norm.is_empty() {
            continue;
        }
        let field = Field::ALL
            .iter()
            .copied()
            .find(|f| !mapping.columns.contains_key(f) && f.synonyms().contains(&norm.as_str()));
        if let Some(f) = field {
            mapping.columns.insert(f, column.as_ref().to_string());
        }
    }
    mapping.check()?;
    Ok(mapping)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_header_maps_all_six() {
        let m = infer_mapping(&[
            "Activity",
            "Action type",
            "UI element",
            "UI group",
            "Input value",
            "Current state",
        ])
        .unwrap();
        assert_eq!(m.columns.len(), 6);
        assert_eq!(m.column(Field::ActivityName), Some("Activity"));
        assert_eq!(m.column(Field::UiGroupPath), Some("UI group"));
        assert_eq!(m.column(Field::CurrentState), Some("Current state"));
    }

    #[test]
    fn unusable_headers() {
        assert!(matches!(infer_mapping(&["foo", "bar"]), Err(IngestError::NoUsableColumns)));
        assert!(matches!(infer_mapping::<&str>(&[]), Err(IngestError::NoUsableColumns)));
        // an action type without any target column cannot name activities
        assert!(matches!(infer_mapping(&["ActionType"]), Err(IngestError::NoUsableColumns)));
    }

    #[test]
    fn compact_spellings() {
        let m = infer_mapping(&["Timestamp", "ActionType", "Target"]).unwrap();
        assert_eq!(m.column(Field::Timestamp), Some("Timestamp"));
        assert_eq!(m.column(Field::ActionType), Some("ActionType"));
        assert_eq!(m.column(Field::UiElement), Some("Target"));
        assert_eq!(m.column(Field::ActivityName), None);
    }

    #[test]
    fn toml_round_trip_and_defaults() {
        let text = r#"
            delimiter = ";"
            naming = "abbreviated"
            timestamp_format = "%d.%m.%Y %H:%M:%S"
            [columns]
            action_type = "Action"
            ui_element = "Widget"
            [parsers]
            "Widget" = "plain"
            "Options" = "list_literal"
        "#;
        let m = ColumnMapping::from_toml(text).unwrap();
        assert_eq!(m.delimiter_byte().unwrap(), b';');
        assert_eq!(m.extras, ExtrasPolicy::Keep);
        assert_eq!(m.naming_scheme(), NamingScheme::abbreviated());
        assert_eq!(ColumnMapping::from_toml(&m.to_toml()).unwrap(), m);
        assert!(ColumnMapping::from_toml("delimiter = \"::\"\n[columns]\nactivity_name = \"A\"").is_err());
        assert!(ColumnMapping::from_toml("bogus = 1").is_err());
    }
}
