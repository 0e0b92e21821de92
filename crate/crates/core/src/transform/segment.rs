use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use super::TransformError;
use crate::model::{InteractionEvent, Trace, UILog};
use crate::tabular::format_cell;

/// How events are grouped into cases.
///
/// Loaded from TOML with a `kind` tag:
///
/// ```toml
/// kind = "composite"
///
/// [[parts]]
/// kind = "by_attribute"
/// key = "user"
///
/// [[parts]]
/// kind = "by_time_gap"
/// threshold_seconds = 1800
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CaseNotion {
    /// Events sharing a value form a case. `user` and `task` read the event's
    /// references; any other key reads a plain event attribute.
    ByAttribute { key: String },
    /// A gap strictly greater than the threshold starts a new case.
    ByTimeGap { threshold_seconds: f64 },
    /// Each occurrence of one of these activities starts a new case.
    ByMarker { activities: IndexSet<String> },
    /// Applied left to right, each part refining the previous partition.
    Composite { parts: Vec<CaseNotion> },
}

impl CaseNotion {
    pub fn by_attribute(key: impl Into<String>) -> Self {
        CaseNotion::ByAttribute { key: key.into() }
    }

    pub fn by_time_gap(threshold_seconds: f64) -> Self {
        CaseNotion::ByTimeGap { threshold_seconds }
    }

    pub fn by_marker<S: Into<String>>(activities: impl IntoIterator<Item = S>) -> Self {
        CaseNotion::ByMarker {
            activities: activities.into_iter().map(Into::into).collect(),
        }
    }

    pub fn check(&self) -> Result<(), TransformError> {
        let invalid = |m: &str| Err(TransformError::InvalidNotion(m.to_string()));
        match self {
            CaseNotion::ByAttribute { key } if key.is_empty() => invalid("empty attribute key"),
            CaseNotion::ByTimeGap { threshold_seconds: t } if !(t.is_finite() && *t > 0.0) => {
                invalid("time-gap threshold must be positive")
            }
            CaseNotion::ByMarker { activities } if activities.is_empty() => {
                invalid("marker set is empty")
            }
            CaseNotion::Composite { parts } if parts.is_empty() => invalid("composite has no parts"),
            CaseNotion::Composite { parts } => parts.iter().try_for_each(CaseNotion::check),
            _ => Ok(()),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, TransformError> {
        let notion: CaseNotion =
            toml::from_str(text).map_err(|e| TransformError::InvalidNotion(e.to_string()))?;
        notion.check()?;
        Ok(notion)
    }
}

fn case_value(event: &InteractionEvent, key: &str) -> Option<String> {
    match key {
        "user" => event.user.clone(),
        "task" => event.task.clone(),
        _ => event.attributes.get(key).map(format_cell),
    }
}

/// One block of the partition being refined: optional id, event indices in order.
type Part = (Option<String>, Vec<usize>);

fn refine(log: &UILog, parts: Vec<Part>, notion: &CaseNotion) -> Result<Vec<Part>, TransformError> {
    let join = |parent: &Option<String>, child: String| match parent {
        Some(p) => format!("{p}/{child}"),
        None => child,
    };
    let mut out = Vec::new();
    match notion {
        CaseNotion::Composite { parts: notions } => {
            let mut current = parts;
            for n in notions {
                current = refine(log, current, n)?;
            }
            return Ok(current);
        }
        CaseNotion::ByAttribute { key } => {
            let missing: Vec<usize> = parts
                .iter()
                .flat_map(|(_, evs)| evs.iter().copied())
                .filter(|&i| case_value(&log.events[i], key).is_none())
                .collect();
            if !missing.is_empty() {
                return Err(TransformError::MissingCaseAttribute {
                    key: key.clone(),
                    events: missing,
                });
            }
            for (id, events) in parts {
                let mut groups: IndexMap<String, Vec<usize>> = IndexMap::new();
                for i in events {
                    let value = case_value(&log.events[i], key).expect("checked above");
                    groups.entry(value).or_default().push(i);
                }
                out.extend(groups.into_iter().map(|(v, evs)| (Some(join(&id, v)), evs)));
            }
        }
        CaseNotion::ByTimeGap { threshold_seconds } => {
            let missing: Vec<usize> = parts
                .iter()
                .flat_map(|(_, evs)| evs.iter().copied())
                .filter(|&i| log.events[i].timestamp.is_none())
                .collect();
            if !missing.is_empty() {
                return Err(TransformError::MissingTimestamps { events: missing });
            }
            let threshold_ms = threshold_seconds * 1000.0;
            for (id, events) in parts {
                let mut blocks: Vec<Vec<usize>> = Vec::new();
                let mut previous: Option<crate::model::Timestamp> = None;
                for i in events {
                    let ts = log.events[i].timestamp.expect("checked above");
                    let split = previous
                        .map(|p| ((ts - p).num_milliseconds() as f64) > threshold_ms)
                        .unwrap_or(true);
                    if split {
                        blocks.push(Vec::new());
                    }
                    blocks.last_mut().expect("opened").push(i);
                    previous = Some(ts);
                }
                out.extend(
                    blocks
                        .into_iter()
                        .enumerate()
                        .map(|(n, evs)| (Some(join(&id, (n + 1).to_string())), evs)),
                );
            }
        }
        CaseNotion::ByMarker { activities } => {
            for (id, events) in parts {
                let mut blocks: Vec<Vec<usize>> = Vec::new();
                for i in events {
                    if blocks.is_empty() || activities.contains(&log.events[i].activity_name) {
                        blocks.push(Vec::new());
                    }
                    blocks.last_mut().expect("opened").push(i);
                }
                out.extend(
                    blocks
                        .into_iter()
                        .enumerate()
                        .map(|(n, evs)| (Some(join(&id, (n + 1).to_string())), evs)),
                );
            }
        }
    }
    Ok(out)
}

/// Groups events into cases. Events stay where they are; only the trace partition
/// is computed. An already traced log is refined trace by trace, child ids being
/// `<parent id>/<child id>` and trace attributes being inherited.
///
/// Case ids are the attribute value for [`CaseNotion::ByAttribute`] and 1-based
/// ordinals for gaps and markers. Cases appear in order of their first event.
pub fn segment(log: &UILog, notion: &CaseNotion) -> Result<UILog, TransformError> {
    notion.check()?;
    let (initial, attributes): (Vec<Part>, Vec<_>) = match &log.traces {
        Some(traces) => traces
            .iter()
            .map(|t| ((Some(t.id.clone()), t.events.clone()), t.attributes.clone()))
            .unzip(),
        None => (vec![(None, (0..log.events.len()).collect())], vec![Default::default()]),
    };
    let mut owner = vec![0usize; log.events.len()];
    for (p, (_, evs)) in initial.iter().enumerate() {
        for &i in evs {
            if let Some(o) = owner.get_mut(i) {
                *o = p;
            }
        }
    }
    let parts = refine(log, initial, notion)?;
    let traces = parts
        .into_iter()
        .filter(|(_, evs)| !evs.is_empty())
        .map(|(id, evs)| {
            let mut trace = Trace::new(id.unwrap_or_default(), evs);
            trace.attributes = attributes[owner[trace.events[0]]].clone();
            trace
        })
        .collect();
    let mut out = log.clone();
    out.traces = Some(traces);
    Ok(out)
}

/// Removes the trace partition. Traces are concatenated in order of their first
/// event's timestamp (traces whose first event has none go last), ties broken by
/// trace id. Events are not re-interleaved.
pub fn flatten(log: &UILog) -> UILog {
    let Some(traces) = &log.traces else {
        return log.clone();
    };
    let mut order: Vec<&Trace> = traces.iter().collect();
    order.sort_by(|a, b| {
        let start = |t: &Trace| t.events.first().and_then(|&i| log.events[i].timestamp);
        match (start(a), start(b)) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        }
        .then_with(|| a.id.cmp(&b.id))
    });
    let mut out = log.clone();
    out.events = order
        .iter()
        .flat_map(|t| t.events.iter().map(|&i| log.events[i].clone()))
        .collect();
    out.traces = None;
    out
}
