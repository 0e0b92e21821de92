//! Cell literals: `{k: v, k: v}` maps and `[v, v]` lists.
//!
//! Items are trimmed and literals do not nest. A doubled `,` stands for a literal
//! comma anywhere in an item; a doubled `:` stands for a literal colon inside a map
//! key. Only the outermost brackets are structural.

use indexmap::IndexMap;
use thiserror::Error;

use super::mapping::ValueParser;
use crate::model::{format_timestamp, AttributeValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("`{0}` is not a map literal")]
    NotAMap(String),
    #[error("`{0}` is not a list literal")]
    NotAList(String),
    #[error("map item `{0}` has no `key: value` separator")]
    MissingColon(String),
    #[error("map item `{0}` has an empty key")]
    EmptyKey(String),
    #[error("map literal repeats key `{0}`")]
    DuplicateKey(String),
}

/// Splits on single occurrences of `sep`; a doubled `sep` is kept as one literal.
fn split_escaped(s: &str, sep: char) -> Vec<String> {
    let mut items = Vec::new();
    let mut current = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == sep {
            if chars.peek() == Some(&sep) {
                chars.next();
                current.push(sep);
            } else {
                items.push(std::mem::take(&mut current));
            }
        } else {
            current.push(c);
        }
    }
    items.push(current);
    items
}

/// Splits at the first single `sep`, unescaping doubled ones on the left side.
fn split_first_escaped(s: &str, sep: char) -> Option<(String, &str)> {
    let mut key = String::new();
    let mut iter = s.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c == sep {
            if matches!(iter.peek(), Some((_, n)) if *n == sep) {
                iter.next();
                key.push(sep);
            } else {
                return Some((key, &s[i + c.len_utf8()..]));
            }
        } else {
            key.push(c);
        }
    }
    None
}

fn inner(s: &str, open: char, close: char) -> Option<&str> {
    let s = s.trim();
    (s.len() >= 2 && s.starts_with(open) && s.ends_with(close)).then(|| &s[1..s.len() - 1])
}

pub fn parse_list_literal(s: &str) -> Result<AttributeValue, LiteralError> {
    let body = inner(s, '[', ']').ok_or_else(|| LiteralError::NotAList(s.to_string()))?;
    if body.trim().is_empty() {
        return Ok(AttributeValue::List(Vec::new()));
    }
    Ok(AttributeValue::List(
        split_escaped(body, ',')
            .into_iter()
            .map(|item| AttributeValue::Text(item.trim().to_string()))
            .collect(),
    ))
}

pub fn parse_map_literal(s: &str) -> Result<AttributeValue, LiteralError> {
    let body = inner(s, '{', '}').ok_or_else(|| LiteralError::NotAMap(s.to_string()))?;
    let mut map = IndexMap::new();
    if body.trim().is_empty() {
        return Ok(AttributeValue::Map(map));
    }
    for item in split_escaped(body, ',') {
        let (key, value) =
            split_first_escaped(&item, ':').ok_or_else(|| LiteralError::MissingColon(item.clone()))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(LiteralError::EmptyKey(item.clone()));
        }
        if map
            .insert(key.clone(), AttributeValue::Text(value.trim().to_string()))
            .is_some()
        {
            return Err(LiteralError::DuplicateKey(key));
        }
    }
    Ok(AttributeValue::Map(map))
}

/// Parses a (non-empty) cell with the given parser.
pub fn parse_cell(raw: &str, parser: ValueParser) -> Result<AttributeValue, LiteralError> {
    let s = raw.trim();
    match parser {
        ValueParser::Plain => Ok(AttributeValue::Text(s.to_string())),
        ValueParser::MapLiteral => parse_map_literal(s),
        ValueParser::ListLiteral => parse_list_literal(s),
        ValueParser::Auto => {
            if s.starts_with('{') && s.ends_with('}') {
                parse_map_literal(s)
            } else if s.starts_with('[') && s.ends_with(']') {
                parse_list_literal(s)
            } else {
                Ok(AttributeValue::Text(s.to_string()))
            }
        }
    }
}

fn scalar(v: &AttributeValue) -> String {
    match v {
        AttributeValue::Timestamp(t) => format_timestamp(t),
        AttributeValue::Text(s) => s.clone(),
        other => other.to_string(),
    }
}

fn double(s: &str, c: char) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        out.push(ch);
        if ch == c {
            out.push(c);
        }
    }
    out
}

/// Renders a value as a cell; inverse of [`parse_cell`] for text, maps and lists of
/// text. A list holding a single empty string renders as `[]` and reads back empty.
pub fn format_cell(v: &AttributeValue) -> String {
    match v {
        AttributeValue::List(items) => {
            let parts: Vec<String> = items.iter().map(|i| double(&scalar(i), ',')).collect();
            format!("[{}]", parts.join(", "))
        }
        AttributeValue::Map(entries) => {
            let parts: Vec<String> = entries
                .iter()
                .map(|(k, v)| {
                    format!("{}: {}", double(&double(k, ','), ':'), double(&scalar(v), ','))
                })
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => scalar(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn login_map() {
        let v = parse_cell("{username: pren, password: dts123}", ValueParser::Auto).unwrap();
        assert_eq!(v, AttributeValue::map([("username", "pren"), ("password", "dts123")]));
        assert_eq!(format_cell(&v), "{username: pren, password: dts123}");
    }

    #[test]
    fn dropdown_options() {
        let v = parse_cell("[keyword, keywords folder]", ValueParser::Auto).unwrap();
        assert_eq!(v, AttributeValue::list(["keyword", "keywords folder"]));
        assert_eq!(parse_cell("[linksto]", ValueParser::Auto).unwrap(), AttributeValue::list(["linksto"]));
    }

    #[test]
    fn plain_and_empty_literals() {
        assert_eq!(parse_cell(" MyKeyword ", ValueParser::Auto).unwrap(), AttributeValue::text("MyKeyword"));
        assert_eq!(parse_cell("[]", ValueParser::Auto).unwrap(), AttributeValue::List(vec![]));
        assert_eq!(parse_cell("{ }", ValueParser::Auto).unwrap(), AttributeValue::map::<&str, &str, _>([]));
        assert_eq!(parse_cell("{a}", ValueParser::Plain).unwrap(), AttributeValue::text("{a}"));
    }

    #[test]
    fn escapes() {
        let v = parse_cell("{a::b: x,, y, c: d:e}", ValueParser::MapLiteral).unwrap();
        assert_eq!(v, AttributeValue::map([("a:b", "x, y"), ("c", "d:e")]));
        let l = parse_cell("[1,,000, 2]", ValueParser::ListLiteral).unwrap();
        assert_eq!(l, AttributeValue::list(["1,000", "2"]));
    }

    #[test]
    fn bad_literals() {
        assert!(matches!(parse_cell("{novalue}", ValueParser::Auto), Err(LiteralError::MissingColon(_))));
        assert!(matches!(parse_cell("{: v}", ValueParser::Auto), Err(LiteralError::EmptyKey(_))));
        assert!(matches!(parse_cell("{a: 1, a: 2}", ValueParser::Auto), Err(LiteralError::DuplicateKey(_))));
        assert!(matches!(parse_cell("plain", ValueParser::ListLiteral), Err(LiteralError::NotAList(_))));
        assert!(matches!(parse_cell("[x]", ValueParser::MapLiteral), Err(LiteralError::NotAMap(_))));
    }

    fn item() -> impl Strategy<Value = String> {
        "[a-z0-9,:\\[\\]{} ]{0,8}".prop_map(|s| s.trim().to_string())
    }

    proptest! {
        #[test]
        fn list_literals_round_trip(items in prop::collection::vec(item(), 1..5)
            .prop_filter("one empty item reads back as []", |v| v != &[String::new()])) {
            let v = AttributeValue::list(items.iter().map(String::as_str));
            prop_assert_eq!(parse_cell(&format_cell(&v), ValueParser::ListLiteral).unwrap(), v);
        }

        #[test]
        fn map_literals_round_trip(entries in prop::collection::btree_map(
            item().prop_filter("non-empty key", |k| !k.is_empty()), item(), 0..5)) {
            let v = AttributeValue::map(entries);
            prop_assert_eq!(parse_cell(&format_cell(&v), ValueParser::MapLiteral).unwrap(), v);
        }
    }
}
