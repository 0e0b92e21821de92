//! Core-attribute coverage and log profiles.
//!
//! Coverage is counted per event. `ui_hierarchy` counts events whose resolved target
//! has at least one ancestor; `application` counts events whose target is an
//! application or lies below one. An action type of `none` counts as present.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::model::{Level, UILog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreAttribute {
    ActionType,
    TargetElement,
    UiHierarchy,
    Application,
    InputValue,
    Timestamp,
    CurrentState,
}

impl CoreAttribute {
    pub const ALL: [CoreAttribute; 7] = [
        CoreAttribute::ActionType,
        CoreAttribute::TargetElement,
        CoreAttribute::UiHierarchy,
        CoreAttribute::Application,
        CoreAttribute::InputValue,
        CoreAttribute::Timestamp,
        CoreAttribute::CurrentState,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CoreAttribute::ActionType => "action_type",
            CoreAttribute::TargetElement => "target_element",
            CoreAttribute::UiHierarchy => "ui_hierarchy",
            CoreAttribute::Application => "application",
            CoreAttribute::InputValue => "input_value",
            CoreAttribute::Timestamp => "timestamp",
            CoreAttribute::CurrentState => "current_state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEntry {
    pub attribute: CoreAttribute,
    pub events_present: usize,
    pub events_total: usize,
}

impl CoverageEntry {
    /// Share of events carrying the attribute; 0 for an empty log.
    pub fn ratio(&self) -> f64 {
        if self.events_total == 0 {
            0.0
        } else {
            self.events_present as f64 / self.events_total as f64
        }
    }

    /// Log-level presence: recorded for at least one event.
    pub fn in_log(&self) -> bool {
        self.events_present > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageMatrix {
    pub entries: Vec<CoverageEntry>,
}

impl CoverageMatrix {
    pub fn get(&self, attribute: CoreAttribute) -> CoverageEntry {
        *self
            .entries
            .iter()
            .find(|e| e.attribute == attribute)
            .expect("every core attribute is counted")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::from(
            "core attribute coverage (per event; ui_hierarchy = target has >= 1 ancestor; \
             action type \"none\" counts as present)\n",
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "  {:<15} {:>6}/{:<6} {:>6.2}  in log: {}",
                e.attribute.as_str(),
                e.events_present,
                e.events_total,
                e.ratio(),
                if e.in_log() { "yes" } else { "no" }
            );
        }
        out
    }
}

pub fn coverage(log: &UILog) -> CoverageMatrix {
    let h = &log.hierarchy;
    let mut counts = [0usize; 7];
    for e in &log.events {
        let path = e
            .target
            .filter(|t| h.check_target(*t).is_ok())
            .and_then(|t| h.ancestor_ids(t.node()).ok())
            .unwrap_or_default();
        let levels: Vec<Level> = path.iter().filter_map(|&n| h.node(n)).map(|n| n.level).collect();
        let target = path.first().and_then(|&n| h.node(n));
        let present = [
            e.action.is_some(),
            levels.first() == Some(&Level::Element),
            path.len() >= 2,
            levels.contains(&Level::Application),
            e.input_value.is_some(),
            e.timestamp.is_some(),
            target.is_some_and(|n| n.level == Level::Element && n.current_state.is_some()),
        ];
        for (c, p) in counts.iter_mut().zip(present) {
            *c += usize::from(p);
        }
    }
    CoverageMatrix {
        entries: CoreAttribute::ALL
            .iter()
            .zip(counts)
            .map(|(&attribute, events_present)| CoverageEntry {
                attribute,
                events_present,
                events_total: log.events.len(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub events: usize,
    pub distinct_activities: usize,
    pub distinct_action_types: usize,
    /// Events whose action type is the literal `none`.
    pub none_actions: usize,
    pub systems: usize,
    pub applications: usize,
    pub ui_groups: usize,
    pub ui_elements: usize,
    pub users: usize,
    pub tasks: usize,
    /// `None` for an untraced log.
    pub traces: Option<usize>,
}

impl Profile {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "events:                {}", self.events);
        let _ = writeln!(out, "distinct activities:   {}", self.distinct_activities);
        let _ = writeln!(out, "distinct action types: {}", self.distinct_action_types);
        let _ = writeln!(out, "\"none\" actions:        {}", self.none_actions);
        let _ = writeln!(
            out,
            "hierarchy nodes:       {} systems, {} applications, {} ui groups, {} ui elements",
            self.systems, self.applications, self.ui_groups, self.ui_elements
        );
        let _ = writeln!(out, "users / tasks:         {} / {}", self.users, self.tasks);
        if let Some(t) = self.traces {
            let _ = writeln!(out, "traces:                {t}");
        }
        out
    }
}

pub fn profile(log: &UILog) -> Profile {
    let activities: BTreeSet<&str> = log.events.iter().map(|e| e.activity_name.as_str()).collect();
    let actions: BTreeSet<&str> = log.events.iter().filter_map(|e| e.action_type()).collect();
    let h = &log.hierarchy;
    Profile {
        events: log.events.len(),
        distinct_activities: activities.len(),
        distinct_action_types: actions.len(),
        none_actions: log
            .events
            .iter()
            .filter(|e| e.action.as_ref().is_some_and(|a| a.is_none_type()))
            .count(),
        systems: h.count(Level::System),
        applications: h.count(Level::Application),
        ui_groups: h.count(Level::Group),
        ui_elements: h.count(Level::Element),
        users: log.users.len(),
        tasks: log.tasks.len(),
        traces: log.traces.as_ref().map(Vec::len),
    }
}
