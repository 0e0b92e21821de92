//! Whole-log invariant checking.
//!
//! [`validate`] never fails; every breach becomes a [`Violation`] with a locator. An
//! empty report means the log satisfies every model invariant.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::model::{AttributeSet, Level, NodeId, UILog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ViolationCode {
    MissingActivityName,
    DanglingReference,
    CycleDetected,
    LevelViolation,
    OutOfOrderTimestamp,
    DuplicateId,
    PartitionGap,
    PartitionOverlap,
    /// Empty node, user, task, trace id or action type.
    EmptyIdentifier,
    /// Empty attribute key or a value nested deeper than the cap.
    InvalidAttribute,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::MissingActivityName => "MissingActivityName",
            ViolationCode::DanglingReference => "DanglingReference",
            ViolationCode::CycleDetected => "CycleDetected",
            ViolationCode::LevelViolation => "LevelViolation",
            ViolationCode::OutOfOrderTimestamp => "OutOfOrderTimestamp",
            ViolationCode::DuplicateId => "DuplicateId",
            ViolationCode::PartitionGap => "PartitionGap",
            ViolationCode::PartitionOverlap => "PartitionOverlap",
            ViolationCode::EmptyIdentifier => "EmptyIdentifier",
            ViolationCode::InvalidAttribute => "InvalidAttribute",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One invariant breach. Event-scoped codes set `event_index`, hierarchy-scoped
/// codes set `node_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub event_index: Option<usize>,
    pub node_id: Option<String>,
    pub message: String,
}

impl Violation {
    fn event(code: ViolationCode, index: usize, message: impl Into<String>) -> Self {
        Violation {
            code,
            event_index: Some(index),
            node_id: None,
            message: message.into(),
        }
    }

    fn node(code: ViolationCode, id: &str, message: impl Into<String>) -> Self {
        Violation {
            code,
            event_index: None,
            node_id: Some(id.to_string()),
            message: message.into(),
        }
    }

    fn log(code: ViolationCode, message: impl Into<String>) -> Self {
        Violation {
            code,
            event_index: None,
            node_id: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)?;
        if let Some(i) = self.event_index {
            write!(f, " [event {i}]")?;
        }
        if let Some(n) = &self.node_id {
            write!(f, " [node `{n}`]")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub checked_events: usize,
    pub checked_nodes: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, code: ViolationCode) -> usize {
        self.violations.iter().filter(|v| v.code == code).count()
    }

    /// Plain-text rendering: a summary line, then one line per violation.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{} violation{} (checked {} events, {} hierarchy nodes)\n",
            self.violations.len(),
            if self.violations.len() == 1 { "" } else { "s" },
            self.checked_events,
            self.checked_nodes
        );
        for v in &self.violations {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    /// One JSON object per line, one line per violation.
    pub fn render_json_lines(&self) -> String {
        self.violations
            .iter()
            .map(|v| serde_json::to_string(v).expect("violation serializes") + "\n")
            .collect()
    }
}

/// Checks every model invariant of `log`.
pub fn validate(log: &UILog) -> ValidationReport {
    let mut out = Vec::new();
    check_hierarchy(log, &mut out);
    check_registries(log, &mut out);
    check_events(log, &mut out);
    check_partition(log, &mut out);
    check_order(log, &mut out);
    check_attributes(&log.attributes, &mut out, |m| Violation::log(ViolationCode::InvalidAttribute, m));
    ValidationReport {
        violations: out,
        checked_events: log.events.len(),
        checked_nodes: log.hierarchy.len(),
    }
}

fn check_attributes(
    attrs: &AttributeSet,
    out: &mut Vec<Violation>,
    make: impl Fn(String) -> Violation,
) {
    if let Err(e) = attrs.check() {
        out.push(make(format!("invalid attribute: {e}")));
    }
}

fn check_hierarchy(log: &UILog, out: &mut Vec<Violation>) {
    let h = &log.hierarchy;
    let n = h.len();
    let mut siblings = HashSet::new();
    for (nid, node) in h.nodes() {
        let id = node.id.as_str();
        if id.is_empty() {
            out.push(Violation::node(
                ViolationCode::EmptyIdentifier,
                id,
                format!("{} #{} has an empty id", node.level, nid.index()),
            ));
        }
        check_attributes(&node.attributes, out, |m| {
            Violation::node(ViolationCode::InvalidAttribute, id, m)
        });
        if let Some(state) = &node.current_state {
            if node.level != Level::Element {
                out.push(Violation::node(
                    ViolationCode::LevelViolation,
                    id,
                    format!("{} carries a current state; only elements do", node.level),
                ));
            }
            if let Err(e) = state.check() {
                out.push(Violation::node(
                    ViolationCode::InvalidAttribute,
                    id,
                    format!("invalid current state: {e}"),
                ));
            }
        }
        if let Some(p) = node.parent { match h.node(p) {
            None => out.push(Violation::node(
                ViolationCode::DanglingReference,
                id,
                format!("parent #{} does not exist", p.index()),
            )),
            Some(parent) if !node.level.accepts_parent(parent.level) => {
                out.push(Violation::node(
                    ViolationCode::LevelViolation,
                    id,
                    format!("{} placed under {} `{}`", node.level, parent.level, parent.id),
                ))
            }
            Some(_) => {}
        } }
        if !siblings.insert((node.parent, node.level, id)) {
            out.push(Violation::node(
                ViolationCode::DuplicateId,
                id,
                format!("another {} with this id shares the same parent", node.level),
            ));
        }
    }

    // Each cycle is reported once, located at its lowest-indexed member.
    let mut reported: HashSet<usize> = HashSet::new();
    for start in 0..n {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut walk = Vec::new();
        let mut cursor = Some(start);
        while let Some(i) = cursor {
            if i >= n {
                break;
            }
            if let Some(&pos) = seen.get(&i) {
                let cycle = &walk[pos..];
                let anchor = *cycle.iter().min().expect("non-empty cycle");
                if reported.insert(anchor) {
                    let node = h.node(NodeId::from_index(anchor)).expect("in range");
                    let members: Vec<&str> = cycle
                        .iter()
                        .map(|&c| h.node(NodeId::from_index(c)).expect("in range").id.as_str())
                        .collect();
                    out.push(Violation::node(
                        ViolationCode::CycleDetected,
                        &node.id,
                        format!("parent chain loops through {}", members.join(" -> ")),
                    ));
                }
                break;
            }
            seen.insert(i, walk.len());
            walk.push(i);
            cursor = h.node(NodeId::from_index(i)).and_then(|x| x.parent).map(|p| p.index());
        }
    }
}

fn check_registries(log: &UILog, out: &mut Vec<Violation>) {
    let entries = log
        .users
        .iter()
        .map(|u| ("user", u.id.as_str(), &u.attributes))
        .chain(log.tasks.iter().map(|t| ("task", t.id.as_str(), &t.attributes)));
    let mut seen = HashSet::new();
    for (what, id, attrs) in entries {
        if id.is_empty() {
            out.push(Violation::log(ViolationCode::EmptyIdentifier, format!("{what} with empty id")));
        } else if !seen.insert((what, id)) {
            out.push(Violation::log(
                ViolationCode::DuplicateId,
                format!("{what} `{id}` registered twice"),
            ));
        }
        check_attributes(attrs, out, |m| {
            Violation::log(ViolationCode::InvalidAttribute, format!("{what} `{id}`: {m}"))
        });
    }
}

fn check_events(log: &UILog, out: &mut Vec<Violation>) {
    for (i, e) in log.events.iter().enumerate() {
        if e.activity_name.is_empty() {
            out.push(Violation::event(
                ViolationCode::MissingActivityName,
                i,
                "activity name is empty",
            ));
        }
        if let Some(action) = &e.action {
            if action.action_type.is_empty() {
                out.push(Violation::event(
                    ViolationCode::EmptyIdentifier,
                    i,
                    "action present with an empty action type",
                ));
            }
            check_attributes(&action.attributes, out, |m| {
                Violation::event(ViolationCode::InvalidAttribute, i, format!("action: {m}"))
            });
        }
        if let Some(t) = e.target {
            if let Err(err) = log.hierarchy.check_target(t) {
                out.push(Violation::event(ViolationCode::DanglingReference, i, err.to_string()));
            }
        }
        if let Some(u) = &e.user {
            if log.user(u).is_none() {
                out.push(Violation::event(
                    ViolationCode::DanglingReference,
                    i,
                    format!("user `{u}` is not registered"),
                ));
            }
        }
        if let Some(t) = &e.task {
            if log.task(t).is_none() {
                out.push(Violation::event(
                    ViolationCode::DanglingReference,
                    i,
                    format!("task `{t}` is not registered"),
                ));
            }
        }
        if let Some(v) = &e.input_value {
            if let Err(err) = v.check() {
                out.push(Violation::event(
                    ViolationCode::InvalidAttribute,
                    i,
                    format!("input value: {err}"),
                ));
            }
        }
        check_attributes(&e.attributes, out, |m| {
            Violation::event(ViolationCode::InvalidAttribute, i, m)
        });
    }
}

fn check_partition(log: &UILog, out: &mut Vec<Violation>) {
    let Some(traces) = &log.traces else { return };
    let n = log.events.len();
    let mut owner: Vec<Option<&str>> = vec![None; n];
    let mut ids = HashSet::new();
    for trace in traces {
        if trace.id.is_empty() {
            out.push(Violation::log(ViolationCode::EmptyIdentifier, "trace with empty id"));
        } else if !ids.insert(trace.id.as_str()) {
            out.push(Violation::log(
                ViolationCode::DuplicateId,
                format!("trace id `{}` used twice", trace.id),
            ));
        }
        check_attributes(&trace.attributes, out, |m| {
            Violation::log(ViolationCode::InvalidAttribute, format!("trace `{}`: {m}", trace.id))
        });
        for &i in &trace.events {
            if i >= n {
                out.push(Violation::event(
                    ViolationCode::DanglingReference,
                    i,
                    format!("trace `{}` lists event {i} but the log has {n}", trace.id),
                ));
                continue;
            }
            match owner[i] {
                Some(first) => out.push(Violation::event(
                    ViolationCode::PartitionOverlap,
                    i,
                    format!("event is in trace `{first}` and again in `{}`", trace.id),
                )),
                None => owner[i] = Some(&trace.id),
            }
        }
    }
    for (i, o) in owner.iter().enumerate() {
        if o.is_none() {
            out.push(Violation::event(
                ViolationCode::PartitionGap,
                i,
                "event belongs to no trace",
            ));
        }
    }
}

fn check_order(log: &UILog, out: &mut Vec<Violation>) {
    for seq in log.sequences() {
        let mut last = None;
        for i in seq.into_iter().filter(|&i| i < log.events.len()) {
            let Some(ts) = log.events[i].timestamp else { continue };
            if let Some(prev) = last {
                if ts < prev {
                    out.push(Violation::event(
                        ViolationCode::OutOfOrderTimestamp,
                        i,
                        format!(
                            "timestamp {} precedes the previous {}",
                            crate::model::format_timestamp(&ts),
                            crate::model::format_timestamp(&prev)
                        ),
                    ));
                }
            }
            last = Some(ts);
        }
    }
}
