use chrono::{DateTime, NaiveDateTime, Utc};
use indexmap::IndexMap;

use super::literal::parse_cell;
use super::mapping::{ColumnMapping, ExtrasPolicy, Field, ValueParser};
use super::IngestError;
use crate::model::{
    make_activity_name, Associations, AttributeValue, InteractionEvent, OrderCheck, Timestamp,
    Trace, UILog,
};
use crate::path::decode_group_path;
use crate::xes::keys;

/// A data row that produced no event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRow {
    /// 1-based data row number, not counting the header.
    pub row: usize,
    pub reason: String,
}

impl SkippedRow {
    fn new(row: usize, reason: impl Into<String>) -> Self {
        SkippedRow {
            row,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub events_created: usize,
    pub rows_skipped: Vec<SkippedRow>,
    /// Events whose activity name was derived from action type and target.
    pub synthesized_names: usize,
    pub warnings: Vec<String>,
}

impl IngestReport {
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{} rows read, {} events created, {} rows skipped, {} names synthesized\n",
            self.rows_read,
            self.events_created,
            self.rows_skipped.len(),
            self.synthesized_names
        );
        for s in &self.rows_skipped {
            out.push_str(&format!("row {}: skipped: {}\n", s.row, s.reason));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

pub fn parse_timestamp(raw: &str, format: Option<&str>) -> Result<Timestamp, String> {
    match format {
        None => DateTime::parse_from_rfc3339(raw)
            .map(|t| t.with_timezone(&Utc))
            .map_err(|e| format!("`{raw}` is not an RFC 3339 timestamp: {e}")),
        Some(fmt) => DateTime::parse_from_str(raw, fmt)
            .map(|t| t.with_timezone(&Utc))
            .or_else(|_| NaiveDateTime::parse_from_str(raw, fmt).map(|n| n.and_utc()))
            .map_err(|e| format!("`{raw}` does not match `{fmt}`: {e}")),
    }
}

struct Columns {
    fields: Vec<(Field, usize, ValueParser)>,
    extras: Vec<(usize, String)>,
}

fn locate(header: &csv::StringRecord, mapping: &ColumnMapping) -> Result<Columns, IngestError> {
    let position = |name: &str| header.iter().position(|h| h.trim() == name);
    let mut fields = Vec::new();
    for (&field, name) in &mapping.columns {
        let idx = position(name).ok_or_else(|| IngestError::MissingColumn(name.clone()))?;
        fields.push((field, idx, mapping.parser_for(field)));
    }
    let mut extras = Vec::new();
    if mapping.extras == ExtrasPolicy::Keep {
        for (idx, h) in header.iter().enumerate() {
            let h = h.trim();
            if h.is_empty() || fields.iter().any(|&(_, i, _)| i == idx) {
                continue;
            }
            if extras.iter().any(|(_, e)| e == h) {
                continue;
            }
            extras.push((idx, h.to_string()));
        }
    }
    Ok(Columns { fields, extras })
}

/// Everything a row contributes, collected before the log is touched so that a
/// skipped row leaves no trace in the hierarchy or registries.
struct Row {
    name: Option<String>,
    action: Option<String>,
    assoc: Associations,
    input: Option<AttributeValue>,
    state: Option<AttributeValue>,
    timestamp: Option<Timestamp>,
    user: Option<String>,
    task: Option<String>,
    trace: Option<String>,
    extras: Vec<(String, AttributeValue)>,
}

fn read_row(
    record: &csv::StringRecord,
    cols: &Columns,
    mapping: &ColumnMapping,
    row: usize,
    warnings: &mut Vec<String>,
) -> Result<Row, String> {
    let mut out = Row {
        name: None,
        action: None,
        assoc: Associations::default(),
        input: None,
        state: None,
        timestamp: None,
        user: None,
        task: None,
        trace: None,
        extras: Vec::new(),
    };
    let mut literal = |raw: &str, parser: ValueParser, field: Field| match parse_cell(raw, parser) {
        Ok(v) => v,
        Err(e) => {
            warnings.push(format!("row {row}: {field}: {e}; kept as text"));
            AttributeValue::text(raw.trim())
        }
    };
    for &(field, idx, parser) in &cols.fields {
        let Some(raw) = record.get(idx).map(str::trim).filter(|s| !s.is_empty()) else {
            continue;
        };
        let text = Some(raw.to_string());
        match field {
            Field::ActivityName => out.name = text,
            Field::ActionType => out.action = text,
            Field::UiElement => out.assoc.element = text,
            Field::UiGroupPath => {
                out.assoc.groups = decode_group_path(raw)
                    .map_err(|e| format!("bad UI group path `{raw}`: {e}"))?
            }
            Field::Application => out.assoc.application = text,
            Field::System => out.assoc.system = text,
            Field::InputValue => out.input = Some(literal(raw, parser, field)),
            Field::CurrentState => out.state = Some(literal(raw, parser, field)),
            Field::Timestamp => {
                out.timestamp = Some(parse_timestamp(raw, mapping.timestamp_format.as_deref())?)
            }
            Field::User => out.user = text,
            Field::Task => out.task = text,
            Field::TraceId => out.trace = text,
        }
    }
    for (idx, key) in &cols.extras {
        if let Some(raw) = record.get(*idx).map(str::trim).filter(|s| !s.is_empty()) {
            if keys::is_reserved(key) {
                warnings.push(format!("row {row}: column `{key}` uses a reserved key; dropped"));
                continue;
            }
            out.extras.push((key.clone(), AttributeValue::text(raw)));
        }
    }
    Ok(out)
}

/// Converts delimiter-separated text to a log.
///
/// Rows are processed in file order and each yields at most one event. A row is
/// skipped (and reported) when its timestamp does not parse, when its group path is
/// malformed, or when it has neither an activity name nor enough to synthesize one.
/// Unparseable literals are kept as plain text with a warning. When a trace column
/// is mapped, rows sharing a trace id form one trace, in order of first appearance.
pub fn ingest(text: &str, mapping: &ColumnMapping) -> Result<(UILog, IngestReport), IngestError> {
    ingest_reader(text.as_bytes(), mapping)
}

pub fn ingest_reader<R: std::io::Read>(
    reader: R,
    mapping: &ColumnMapping,
) -> Result<(UILog, IngestReport), IngestError> {
    mapping.check()?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter_byte()?)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| IngestError::Csv(e.to_string()))?.clone();
    let cols = locate(&header, mapping)?;
    let naming = mapping.naming_scheme();
    let traced = mapping.columns.contains_key(&Field::TraceId);

    let mut log = UILog::new();
    let mut report = IngestReport::default();
    let mut traces: IndexMap<String, Vec<usize>> = IndexMap::new();

    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| IngestError::Csv(e.to_string()))?;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        report.rows_read += 1;
        let mut r = match read_row(&record, &cols, mapping, row, &mut report.warnings) {
            Ok(r) => r,
            Err(reason) => {
                report.rows_skipped.push(SkippedRow::new(row, reason));
                continue;
            }
        };
        if traced && r.trace.is_none() {
            report.rows_skipped.push(SkippedRow::new(row, "empty trace id"));
            continue;
        }
        if r.assoc.has_orphaned_system() {
            report.warnings.push(format!(
                "row {row}: system `{}` given without an application; dropped",
                r.assoc.system.as_deref().unwrap_or_default()
            ));
            r.assoc.system = None;
        }
        let lowest_id = r
            .assoc
            .element
            .clone()
            .or_else(|| r.assoc.groups.last().cloned())
            .or_else(|| r.assoc.application.clone())
            .or_else(|| r.assoc.system.clone());
        let synthesized = r.name.is_none();
        let name = match (r.name.take(), &r.action, &lowest_id) {
            (Some(n), _, _) => n,
            (None, Some(action), Some(id)) => make_activity_name(action, id, &naming),
            _ => {
                report.rows_skipped.push(SkippedRow::new(row, "no activity name and nothing to derive one from"));
                continue;
            }
        };

        let target = match log.hierarchy.intern_associations(&r.assoc) {
            Ok(t) => t,
            Err(e) => {
                report.rows_skipped.push(SkippedRow::new(row, e.to_string()));
                continue;
            }
        };
        if let Some(state) = r.state {
            match target {
                Some(t) if t.level() == crate::model::Level::Element => {
                    let previous = log.hierarchy.set_current_state(t.node(), state.clone());
                    if let Ok(Some(prev)) = previous {
                        if prev != state {
                            report.warnings.push(format!(
                                "row {row}: current state of `{}` changed from {prev} to {state}; latest kept",
                                r.assoc.element.as_deref().unwrap_or_default()
                            ));
                        }
                    }
                }
                _ => report
                    .warnings
                    .push(format!("row {row}: current state without a UI element; dropped")),
            }
        }
        if let Some(u) = &r.user {
            log.ensure_user(u).map_err(|e| IngestError::InvalidMapping(e.to_string()))?;
        }
        if let Some(t) = &r.task {
            log.ensure_task(t).map_err(|e| IngestError::InvalidMapping(e.to_string()))?;
        }

        let mut event = InteractionEvent::new(name);
        event.target = target;
        if let Some(a) = r.action {
            event = event.with_action(a);
        }
        if let Some(v) = r.input {
            event = event.with_input(v);
        }
        if let Some(ts) = r.timestamp {
            event = event.at(ts);
        }
        event.user = r.user;
        event.task = r.task;
        for (k, v) in r.extras {
            event.attributes.insert_unchecked(k, v);
        }
        match log.append_event(event, OrderCheck::Lenient) {
            Ok(idx) => {
                report.events_created += 1;
                if synthesized {
                    report.synthesized_names += 1;
                }
                if let Some(t) = r.trace {
                    traces.entry(t).or_default().push(idx);
                }
            }
            Err(e) => report.rows_skipped.push(SkippedRow::new(row, e.to_string())),
        }
    }
    if traced {
        log.traces = Some(
            traces
                .into_iter()
                .map(|(id, events)| Trace::new(id, events))
                .collect(),
        );
    }
    Ok((log, report))
}
