use indexmap::IndexSet;

use super::literal::format_cell;
use super::mapping::{ColumnMapping, ExtrasPolicy, Field};
use super::IngestError;
use crate::model::{format_timestamp, Level, UILog};
use crate::path::encode_group_path;

/// Writes a log as delimiter-separated text; the inverse of [`super::ingest`].
///
/// One row per event in case order. Columns are the mapped fields in declaration
/// order (the trace column only for traced logs), followed by the event attribute
/// keys when extras are kept. Structured extra attributes are rendered as literals
/// and come back as text.
pub fn write_table(log: &UILog, mapping: &ColumnMapping) -> Result<String, IngestError> {
    let fields: Vec<(Field, &str)> = Field::ALL
        .iter()
        .filter(|&&f| f != Field::TraceId || log.is_traced())
        .filter_map(|&f| mapping.column(f).map(|c| (f, c)))
        .collect();
    let extras: IndexSet<&str> = match mapping.extras {
        ExtrasPolicy::Keep => log
            .events
            .iter()
            .flat_map(|e| e.attributes.keys().map(String::as_str))
            .collect(),
        ExtrasPolicy::Ignore => IndexSet::new(),
    };

    let mut wtr = csv::WriterBuilder::new()
        .delimiter(mapping.delimiter_byte()?)
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| IngestError::Csv(e.to_string());
    let header: Vec<&str> = fields.iter().map(|&(_, c)| c).chain(extras.iter().copied()).collect();
    wtr.write_record(&header).map_err(csv_err)?;

    let trace_ids: Vec<Option<&str>> = match &log.traces {
        Some(traces) => traces.iter().map(|t| Some(t.id.as_str())).collect(),
        None => vec![None],
    };
    for (seq, trace_id) in log.sequences().into_iter().zip(trace_ids) {
        for i in seq {
            let event = &log.events[i];
            let assoc = log.associations_of(event).unwrap_or_default();
            let state = event
                .target
                .filter(|t| t.level() == Level::Element)
                .and_then(|t| log.hierarchy.node(t.node()))
                .and_then(|n| n.current_state.as_ref());
            let mut row: Vec<String> = Vec::with_capacity(header.len());
            for &(field, _) in &fields {
                row.push(match field {
                    Field::ActivityName => event.activity_name.clone(),
                    Field::ActionType => event.action_type().unwrap_or_default().to_string(),
                    Field::UiElement => assoc.element.clone().unwrap_or_default(),
                    Field::UiGroupPath => encode_group_path(&assoc.groups),
                    Field::Application => assoc.application.clone().unwrap_or_default(),
                    Field::System => assoc.system.clone().unwrap_or_default(),
                    Field::InputValue => event.input_value.as_ref().map(format_cell).unwrap_or_default(),
                    Field::CurrentState => state.map(format_cell).unwrap_or_default(),
                    Field::Timestamp => match (event.timestamp, &mapping.timestamp_format) {
                        (Some(ts), Some(fmt)) => ts.format(fmt).to_string(),
                        (Some(ts), None) => format_timestamp(&ts),
                        (None, _) => String::new(),
                    },
                    Field::User => event.user.clone().unwrap_or_default(),
                    Field::Task => event.task.clone().unwrap_or_default(),
                    Field::TraceId => trace_id.unwrap_or_default().to_string(),
                });
            }
            for key in &extras {
                row.push(event.attributes.get(key).map(format_cell).unwrap_or_default());
            }
            wtr.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = wtr.into_inner().map_err(|e| IngestError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| IngestError::Csv(e.to_string()))
}
