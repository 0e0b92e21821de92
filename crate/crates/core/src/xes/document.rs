//! Generic XES document tree: log, traces, events and typed (possibly nested)
//! attributes, with XML parsing and canonical serialization.

use std::fmt::Write as _;

use chrono::DateTime;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::XesError;
use crate::model::{format_timestamp, truncate_millis, Timestamp};

#[derive(Debug, Clone, PartialEq)]
pub enum XesValue {
    String(String),
    Date(Timestamp),
    Int(i64),
    Float(f64),
    Boolean(bool),
    Id(String),
    /// Items of a `<list>`; their keys carry no meaning.
    List(Vec<XesAttribute>),
    /// Entries live in [`XesAttribute::children`].
    Container,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XesAttribute {
    pub key: String,
    pub value: XesValue,
    /// Nested attributes; for containers these are the entries.
    pub children: Vec<XesAttribute>,
}

impl XesAttribute {
    pub fn new(key: impl Into<String>, value: XesValue) -> Self {
        XesAttribute {
            key: key.into(),
            value,
            children: Vec::new(),
        }
    }

    pub fn string(key: impl Into<String>, value: impl Into<String>) -> Self {
        Self::new(key, XesValue::String(value.into()))
    }

    pub fn with_children(mut self, children: Vec<XesAttribute>) -> Self {
        self.children = children;
        self
    }

    /// The value as text when it is a string or id.
    pub fn text(&self) -> Option<&str> {
        match &self.value {
            XesValue::String(s) | XesValue::Id(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XesExtensionDecl {
    pub name: String,
    pub prefix: String,
    pub uri: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct XesEvent {
    pub attributes: Vec<XesAttribute>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct XesTrace {
    pub attributes: Vec<XesAttribute>,
    pub events: Vec<XesEvent>,
}

/// One `<log>` element.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct XesDocument {
    pub extensions: Vec<XesExtensionDecl>,
    pub attributes: Vec<XesAttribute>,
    pub traces: Vec<XesTrace>,
}

/// Parsed document plus non-fatal findings (e.g. truncated timestamp precision).
#[derive(Debug, Clone, Default)]
pub struct Parsed {
    pub document: XesDocument,
    pub warnings: Vec<String>,
}

enum Frame {
    Log(XesDocument),
    Trace(XesTrace),
    Event(XesEvent),
    Attr(XesAttribute),
    Values(Vec<XesAttribute>),
    /// Subtree we do not model (globals, classifiers, foreign elements).
    Skip,
}

fn malformed(msg: impl Into<String>) -> XesError {
    XesError::MalformedDocument(msg.into())
}

fn attr_of(start: &BytesStart<'_>, name: &str) -> Result<Option<String>, XesError> {
    for a in start.attributes() {
        let a = a.map_err(|e| malformed(format!("bad XML attribute: {e}")))?;
        if a.key.as_ref() == name.as_bytes() {
            let v = a
                .unescape_value()
                .map_err(|e| malformed(format!("bad XML attribute value: {e}")))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn required(start: &BytesStart<'_>, name: &str, tag: &str) -> Result<String, XesError> {
    attr_of(start, name)?.ok_or_else(|| malformed(format!("<{tag}> without `{name}`")))
}

fn parse_date(s: &str, warnings: &mut Vec<String>) -> Result<Timestamp, XesError> {
    let parsed = DateTime::parse_from_rfc3339(s.trim())
        .map_err(|e| malformed(format!("invalid date `{s}`: {e}")))?;
    let (ts, lost) = truncate_millis(parsed.to_utc());
    if lost {
        warnings.push(format!("timestamp `{s}` truncated to millisecond precision"));
    }
    Ok(ts)
}

fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        other => other.parse().ok(),
    }
}

fn parse_attribute(
    tag: &str,
    start: &BytesStart<'_>,
    warnings: &mut Vec<String>,
) -> Result<XesAttribute, XesError> {
    let key = required(start, "key", tag)?;
    let value = |start: &BytesStart<'_>| required(start, "value", tag);
    let v = match tag {
        "string" => XesValue::String(value(start)?),
        "id" => XesValue::Id(value(start)?),
        "date" => XesValue::Date(parse_date(&value(start)?, warnings)?),
        "int" => {
            let raw = value(start)?;
            XesValue::Int(
                raw.trim()
                    .parse()
                    .map_err(|_| malformed(format!("invalid int `{raw}` for key `{key}`")))?,
            )
        }
        "float" => {
            let raw = value(start)?;
            XesValue::Float(
                parse_float(&raw)
                    .ok_or_else(|| malformed(format!("invalid float `{raw}` for key `{key}`")))?,
            )
        }
        "boolean" => {
            let raw = value(start)?;
            XesValue::Boolean(match raw.trim() {
                "true" | "1" => true,
                "false" | "0" => false,
                _ => return Err(malformed(format!("invalid boolean `{raw}` for key `{key}`"))),
            })
        }
        "list" => XesValue::List(Vec::new()),
        "container" => XesValue::Container,
        _ => unreachable!("caller filters attribute tags"),
    };
    Ok(XesAttribute::new(key, v))
}

const ATTRIBUTE_TAGS: [&str; 8] = [
    "string", "date", "int", "float", "boolean", "id", "list", "container",
];

/// Parses an XES document.
pub fn parse(xml: &str) -> Result<Parsed, XesError> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().check_end_names = true;
    let mut stack: Vec<Frame> = Vec::new();
    let mut done: Option<XesDocument> = None;
    let mut warnings = Vec::new();

    loop {
        let ev = reader
            .read_event()
            .map_err(|e| malformed(format!("XML error at byte {}: {e}", reader.error_position())))?;
        let (start, is_empty) = match ev {
            Event::Start(s) => (s, false),
            Event::Empty(s) => (s, true),
            Event::End(_) => {
                let frame = stack.pop().ok_or_else(|| malformed("unbalanced end tag"))?;
                close(frame, &mut stack, &mut done)?;
                continue;
            }
            Event::Eof => break,
            Event::Text(t) => {
                if !t.iter().all(u8::is_ascii_whitespace)
                    && !matches!(stack.last(), Some(Frame::Skip))
                {
                    return Err(malformed("unexpected text content"));
                }
                continue;
            }
            _ => continue,
        };
        let tag = String::from_utf8_lossy(start.local_name().as_ref()).into_owned();
        let parent_skips = matches!(stack.last(), Some(Frame::Skip));
        let frame = if parent_skips {
            Frame::Skip
        } else {
            match (tag.as_str(), stack.last_mut()) {
                ("log", None) => {
                    if done.is_some() {
                        return Err(malformed("more than one <log> element"));
                    }
                    Frame::Log(XesDocument::default())
                }
                (_, None) => return Err(malformed(format!("expected <log>, found <{tag}>"))),
                ("extension", Some(Frame::Log(doc))) => {
                    doc.extensions.push(XesExtensionDecl {
                        name: attr_of(&start, "name")?.unwrap_or_default(),
                        prefix: required(&start, "prefix", "extension")?,
                        uri: attr_of(&start, "uri")?.unwrap_or_default(),
                    });
                    Frame::Skip
                }
                ("global" | "classifier", Some(Frame::Log(_))) => Frame::Skip,
                ("trace", Some(Frame::Log(_))) => Frame::Trace(XesTrace::default()),
                ("event", Some(Frame::Trace(_))) => Frame::Event(XesEvent::default()),
                ("event", Some(Frame::Log(_))) => {
                    return Err(malformed("<event> outside of a <trace>"))
                }
                ("values", Some(Frame::Attr(a))) if matches!(a.value, XesValue::List(_)) => {
                    Frame::Values(Vec::new())
                }
                (t, Some(_)) if ATTRIBUTE_TAGS.contains(&t) => {
                    Frame::Attr(parse_attribute(t, &start, &mut warnings)?)
                }
                ("trace" | "event" | "log", Some(_)) => {
                    return Err(malformed(format!("misplaced <{tag}>")))
                }
                _ => Frame::Skip,
            }
        };
        if is_empty {
            close(frame, &mut stack, &mut done)?;
        } else {
            stack.push(frame);
        }
    }
    if !stack.is_empty() {
        return Err(malformed("document ended inside an open element"));
    }
    let document = done.ok_or_else(|| malformed("no <log> element"))?;
    Ok(Parsed { document, warnings })
}

fn close(
    frame: Frame,
    stack: &mut [Frame],
    done: &mut Option<XesDocument>,
) -> Result<(), XesError> {
    match frame {
        Frame::Log(doc) => *done = Some(doc),
        Frame::Skip => {}
        Frame::Trace(t) => match stack.last_mut() {
            Some(Frame::Log(doc)) => doc.traces.push(t),
            _ => return Err(malformed("misplaced <trace>")),
        },
        Frame::Event(e) => match stack.last_mut() {
            Some(Frame::Trace(t)) => t.events.push(e),
            _ => return Err(malformed("misplaced <event>")),
        },
        Frame::Values(items) => match stack.last_mut() {
            Some(Frame::Attr(XesAttribute {
                value: XesValue::List(list),
                ..
            })) => list.extend(items),
            _ => return Err(malformed("misplaced <values>")),
        },
        Frame::Attr(a) => match stack.last_mut() {
            Some(Frame::Log(doc)) => doc.attributes.push(a),
            Some(Frame::Trace(t)) => t.attributes.push(a),
            Some(Frame::Event(e)) => e.attributes.push(a),
            Some(Frame::Attr(parent)) => parent.children.push(a),
            Some(Frame::Values(items)) => items.push(a),
            _ => return Err(malformed(format!("misplaced attribute `{}`", a.key))),
        },
    }
    Ok(())
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..)
}

/// Escapes text for a double-quoted XML attribute. Whitespace control characters
/// become character references so parsers cannot normalize them away.
pub(crate) fn escape_attr(s: &str) -> Result<String, XesError> {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c if is_xml_char(c) => out.push(c),
            c => {
                return Err(XesError::UnserializableValue(format!(
                    "character U+{:04X} cannot appear in XML",
                    c as u32
                )))
            }
        }
    }
    Ok(out)
}

fn format_float(f: f64) -> String {
    if f.is_nan() {
        "NaN".into()
    } else if f == f64::INFINITY {
        "INF".into()
    } else if f == f64::NEG_INFINITY {
        "-INF".into()
    } else {
        format!("{f}")
    }
}

struct Out {
    buf: String,
}

impl Out {
    fn line(&mut self, depth: usize, s: &str) {
        for _ in 0..depth {
            self.buf.push_str("  ");
        }
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    fn attribute(&mut self, depth: usize, a: &XesAttribute) -> Result<(), XesError> {
        let key = escape_attr(&a.key)?;
        let (tag, value) = match &a.value {
            XesValue::String(s) => ("string", Some(escape_attr(s)?)),
            XesValue::Id(s) => ("id", Some(escape_attr(s)?)),
            XesValue::Date(ts) => ("date", Some(format_timestamp(ts))),
            XesValue::Int(i) => ("int", Some(i.to_string())),
            XesValue::Float(f) => ("float", Some(format_float(*f))),
            XesValue::Boolean(b) => ("boolean", Some(b.to_string())),
            XesValue::List(_) => ("list", None),
            XesValue::Container => ("container", None),
        };
        let head = match &value {
            Some(v) => format!("<{tag} key=\"{key}\" value=\"{v}\""),
            None => format!("<{tag} key=\"{key}\""),
        };
        let items = match &a.value {
            XesValue::List(items) => Some(items),
            _ => None,
        };
        if a.children.is_empty() && items.is_none() {
            self.line(depth, &format!("{head}/>"));
            return Ok(());
        }
        self.line(depth, &format!("{head}>"));
        for c in &a.children {
            self.attribute(depth + 1, c)?;
        }
        if let Some(items) = items {
            if items.is_empty() {
                self.line(depth + 1, "<values/>");
            } else {
                self.line(depth + 1, "<values>");
                for item in items {
                    self.attribute(depth + 2, item)?;
                }
                self.line(depth + 1, "</values>");
            }
        }
        self.line(depth, &format!("</{tag}>"));
        Ok(())
    }
}

/// Canonical serialization: UTF-8, two-space indentation, attributes in stored order.
pub fn serialize(doc: &XesDocument) -> Result<String, XesError> {
    let mut out = Out { buf: String::new() };
    out.line(0, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    out.line(0, r#"<log xes.version="1849-2016" xes.features="nested-attributes">"#);
    for ext in &doc.extensions {
        out.line(
            1,
            &format!(
                r#"<extension name="{}" prefix="{}" uri="{}"/>"#,
                escape_attr(&ext.name)?,
                escape_attr(&ext.prefix)?,
                escape_attr(&ext.uri)?
            ),
        );
    }
    for a in &doc.attributes {
        out.attribute(1, a)?;
    }
    for trace in &doc.traces {
        out.line(1, "<trace>");
        for a in &trace.attributes {
            out.attribute(2, a)?;
        }
        for event in &trace.events {
            if event.attributes.is_empty() {
                out.line(2, "<event/>");
                continue;
            }
            out.line(2, "<event>");
            for a in &event.attributes {
                out.attribute(3, a)?;
            }
            out.line(2, "</event>");
        }
        out.line(1, "</trace>");
    }
    out.line(0, "</log>");
    Ok(out.buf)
}

/// Writes `xml` into a string buffer; used by the extension definition emitter.
pub(crate) fn push_line(buf: &mut String, depth: usize, s: &str) {
    for _ in 0..depth {
        buf.push_str("  ");
    }
    let _ = writeln!(buf, "{s}");
}
