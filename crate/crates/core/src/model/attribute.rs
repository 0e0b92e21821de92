//! Typed attribute payloads shared by every model component.

use std::fmt;

use chrono::{DateTime, SubsecRound, Utc};
use indexmap::IndexMap;

use super::ModelError;

/// Instants are kept in UTC at millisecond precision.
pub type Timestamp = DateTime<Utc>;

/// Maximum list/map nesting depth accepted anywhere in the model.
pub const MAX_NESTING_DEPTH: usize = 32;

/// Drops sub-millisecond precision. Returns the truncated instant and whether
/// anything was lost.
pub fn truncate_millis(ts: Timestamp) -> (Timestamp, bool) {
    let truncated = ts.trunc_subsecs(3);
    (truncated, truncated != ts)
}

/// A typed, open-ended attribute value.
///
/// Maps keep insertion order so that literals such as `{username: pren, password: dts123}`
/// re-emit exactly as they were read; equality on maps ignores order.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Text(String),
    Int(i64),
    Real(f64),
    Bool(bool),
    Timestamp(Timestamp),
    List(Vec<AttributeValue>),
    Map(IndexMap<String, AttributeValue>),
}

impl AttributeValue {
    pub fn text(s: impl Into<String>) -> Self {
        AttributeValue::Text(s.into())
    }

    /// Builds a map value from `(key, value)` pairs; later duplicates replace earlier ones.
    pub fn map<K, V, I>(entries: I) -> Self
    where
        K: Into<String>,
        V: Into<AttributeValue>,
        I: IntoIterator<Item = (K, V)>,
    {
        AttributeValue::Map(entries.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }

    pub fn list<V, I>(items: I) -> Self
    where
        V: Into<AttributeValue>,
        I: IntoIterator<Item = V>,
    {
        AttributeValue::List(items.into_iter().map(Into::into).collect())
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            AttributeValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&IndexMap<String, AttributeValue>> {
        match self {
            AttributeValue::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[AttributeValue]> {
        match self {
            AttributeValue::List(l) => Some(l),
            _ => None,
        }
    }

    /// Container nesting depth: scalars are 0, `[a]` is 1, `[[a]]` is 2.
    pub fn depth(&self) -> usize {
        match self {
            AttributeValue::List(items) => 1 + items.iter().map(Self::depth).max().unwrap_or(0),
            AttributeValue::Map(entries) => {
                1 + entries.values().map(Self::depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// Checks the nesting cap and that every map key is non-empty.
    pub fn check(&self) -> Result<(), ModelError> {
        if self.depth() > MAX_NESTING_DEPTH {
            return Err(ModelError::NestingTooDeep { depth: self.depth() });
        }
        self.check_keys()
    }

    fn check_keys(&self) -> Result<(), ModelError> {
        match self {
            AttributeValue::List(items) => items.iter().try_for_each(Self::check_keys),
            AttributeValue::Map(entries) => {
                for (k, v) in entries {
                    if k.is_empty() {
                        return Err(ModelError::EmptyIdentifier("map key"));
                    }
                    v.check_keys()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AttributeValue {
    /// Human-oriented rendering; maps and lists use the `{k: v}` / `[a, b]` literal shape.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Text(s) => f.write_str(s),
            AttributeValue::Int(i) => write!(f, "{i}"),
            AttributeValue::Real(r) => write!(f, "{r}"),
            AttributeValue::Bool(b) => write!(f, "{b}"),
            AttributeValue::Timestamp(ts) => f.write_str(&format_timestamp(ts)),
            AttributeValue::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
            AttributeValue::Map(entries) => {
                f.write_str("{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// ISO-8601 with millisecond precision and an explicit `+00:00` offset.
pub fn format_timestamp(ts: &Timestamp) -> String {
    ts.format("%Y-%m-%dT%H:%M:%S%.3f+00:00").to_string()
}

impl From<&str> for AttributeValue {
    fn from(s: &str) -> Self {
        AttributeValue::Text(s.to_string())
    }
}

impl From<String> for AttributeValue {
    fn from(s: String) -> Self {
        AttributeValue::Text(s)
    }
}

impl From<i64> for AttributeValue {
    fn from(i: i64) -> Self {
        AttributeValue::Int(i)
    }
}

impl From<f64> for AttributeValue {
    fn from(r: f64) -> Self {
        AttributeValue::Real(r)
    }
}

impl From<bool> for AttributeValue {
    fn from(b: bool) -> Self {
        AttributeValue::Bool(b)
    }
}

impl From<Timestamp> for AttributeValue {
    fn from(ts: Timestamp) -> Self {
        AttributeValue::Timestamp(ts)
    }
}

/// Free-form attributes attached to any component. Keys are non-empty and unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributeSet(IndexMap<String, AttributeValue>);

impl AttributeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces an attribute, returning the previous value.
    pub fn insert(
        &mut self,
        key: impl Into<String>,
        value: impl Into<AttributeValue>,
    ) -> Result<Option<AttributeValue>, ModelError> {
        let key = key.into();
        if key.is_empty() {
            return Err(ModelError::EmptyIdentifier("attribute key"));
        }
        let value = value.into();
        value.check()?;
        Ok(self.0.insert(key, value))
    }

    /// Builder-style insert; panics on an empty key or over-deep value.
    pub fn with(mut self, key: impl Into<String>, value: impl Into<AttributeValue>) -> Self {
        self.insert(key, value).expect("invalid attribute");
        self
    }

    pub fn get(&self, key: &str) -> Option<&AttributeValue> {
        self.0.get(key)
    }

    pub fn remove(&mut self, key: &str) -> Option<AttributeValue> {
        self.0.shift_remove(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &AttributeValue)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copies every entry of `other` over this set.
    pub fn merge(&mut self, other: &AttributeSet) {
        for (k, v) in other.iter() {
            self.0.insert(k.clone(), v.clone());
        }
    }

    /// Checks every key and value; used by whole-log validation.
    pub fn check(&self) -> Result<(), ModelError> {
        for (k, v) in &self.0 {
            if k.is_empty() {
                return Err(ModelError::EmptyIdentifier("attribute key"));
            }
            v.check()?;
        }
        Ok(())
    }

    /// Inserts without any checks. Only for constructing deliberately broken
    /// fixtures, e.g. when exercising the validator.
    pub fn insert_unchecked(&mut self, key: impl Into<String>, value: AttributeValue) {
        self.0.insert(key.into(), value);
    }
}

impl<'a> IntoIterator for &'a AttributeSet {
    type Item = (&'a String, &'a AttributeValue);
    type IntoIter = indexmap::map::Iter<'a, String, AttributeValue>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
