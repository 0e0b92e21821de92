use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::TransformError;
use crate::model::{
    AttributeValue, InteractionEvent, Level, NodeId, TargetRef, Trace, UILog, NONE_ACTION,
};

fn yes() -> bool {
    true
}

/// Collapses the work done inside one UI group into a single task-level event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractionRule {
    pub group_id: String,
    /// Activity that completes the task, for example the confirming click.
    pub trigger_activity: String,
    pub abstract_name: String,
    /// Elements whose latest input goes into the abstract event's input map.
    /// Empty means every element in the group.
    #[serde(default)]
    pub collect: Vec<String>,
    /// Drop the in-group events that do not end up in the abstract event.
    #[serde(default = "yes")]
    pub drop_noise: bool,
}

impl AbstractionRule {
    pub fn new(
        group_id: impl Into<String>,
        trigger_activity: impl Into<String>,
        abstract_name: impl Into<String>,
    ) -> Self {
        AbstractionRule {
            group_id: group_id.into(),
            trigger_activity: trigger_activity.into(),
            abstract_name: abstract_name.into(),
            collect: Vec::new(),
            drop_noise: true,
        }
    }

    pub fn collecting<S: Into<String>>(mut self, elements: impl IntoIterator<Item = S>) -> Self {
        self.collect = elements.into_iter().map(Into::into).collect();
        self
    }

    pub fn keep_noise(mut self) -> Self {
        self.drop_noise = false;
        self
    }

    pub fn check(&self) -> Result<(), TransformError> {
        for (what, v) in [
            ("group_id", &self.group_id),
            ("trigger_activity", &self.trigger_activity),
            ("abstract_name", &self.abstract_name),
        ] {
            if v.is_empty() {
                return Err(TransformError::InvalidRule(format!("empty {what}")));
            }
        }
        Ok(())
    }
}

/// A TOML rule file: one `[[rule]]` table per rule.
///
/// ```toml
/// [[rule]]
/// group_id = "login mask"
/// trigger_activity = "click login"
/// abstract_name = "A_Login"
/// collect = ["username", "password"]
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSet {
    #[serde(default, rename = "rule")]
    pub rules: Vec<AbstractionRule>,
}

impl RuleSet {
    pub fn from_toml(text: &str) -> Result<Self, TransformError> {
        let set: RuleSet =
            toml::from_str(text).map_err(|e| TransformError::InvalidRule(e.to_string()))?;
        set.rules.iter().try_for_each(AbstractionRule::check)?;
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbstractionWarning {
    /// An in-group run (or its tail) contains no trigger and was left as it was.
    TriggerNeverFires {
        rule: String,
        trace: Option<String>,
        /// Indices into the input log.
        events: Vec<usize>,
    },
}

impl fmt::Display for AbstractionWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractionWarning::TriggerNeverFires { rule, trace, events } => {
                write!(f, "TriggerNeverFires: rule `{rule}`")?;
                if let Some(t) = trace {
                    write!(f, " in trace `{t}`")?;
                }
                write!(f, ": {} event(s) starting at #{} left unabstracted", events.len(), events[0])
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Abstracted {
    pub log: UILog,
    pub warnings: Vec<AbstractionWarning>,
}

/// An event this rule already produced. Such events stay out of runs, which makes
/// abstraction idempotent.
fn is_abstracted(event: &InteractionEvent, rule: &AbstractionRule, group: NodeId) -> bool {
    event.activity_name == rule.abstract_name
        && event.action_type() == Some(NONE_ACTION)
        && event.target == Some(TargetRef::Group(group))
}

/// Output slot of one sequence: either an untouched input event or a new one.
enum Slot {
    Keep(usize),
    New(Box<InteractionEvent>),
}

fn in_group(log: &UILog, event: &InteractionEvent, groups: &[NodeId]) -> Option<NodeId> {
    let target = event.target?.node();
    groups.iter().copied().find(|&g| log.hierarchy.is_within(target, g))
}

fn apply_rule(
    log: &UILog,
    rule: &AbstractionRule,
    warnings: &mut Vec<AbstractionWarning>,
) -> Result<UILog, TransformError> {
    rule.check()?;
    let groups = log.hierarchy.find_all(Level::Group, &rule.group_id);
    if groups.is_empty() {
        return Err(TransformError::UnknownGroup(rule.group_id.clone()));
    }
    let trace_ids: Vec<Option<String>> = match &log.traces {
        Some(ts) => ts.iter().map(|t| Some(t.id.clone())).collect(),
        None => vec![None],
    };

    let mut sequences: Vec<Vec<Slot>> = Vec::new();
    for (seq, trace_id) in log.sequences().into_iter().zip(trace_ids) {
        let mut slots = Vec::with_capacity(seq.len());
        let mut k = 0;
        while k < seq.len() {
            let event = &log.events[seq[k]];
            let group = in_group(log, event, &groups).filter(|&g| !is_abstracted(event, rule, g));
            let Some(group) = group else {
                slots.push(Slot::Keep(seq[k]));
                k += 1;
                continue;
            };
            // maximal run inside this group node
            let mut end = k;
            while end < seq.len() {
                let e = &log.events[seq[end]];
                let inside = e
                    .target
                    .is_some_and(|t| log.hierarchy.is_within(t.node(), group))
                    && !is_abstracted(e, rule, group);
                if !inside {
                    break;
                }
                end += 1;
            }
            let run = &seq[k..end];
            let mut start = 0;
            for (pos, &i) in run.iter().enumerate() {
                if log.events[i].activity_name == rule.trigger_activity {
                    collapse(log, rule, group, &run[start..=pos], &mut slots);
                    start = pos + 1;
                }
            }
            if start < run.len() {
                warnings.push(AbstractionWarning::TriggerNeverFires {
                    rule: rule.abstract_name.clone(),
                    trace: trace_id.clone(),
                    events: run[start..].to_vec(),
                });
                slots.extend(run[start..].iter().map(|&i| Slot::Keep(i)));
            }
            k = end;
        }
        sequences.push(slots);
    }

    let mut out = log.clone();
    out.events.clear();
    let mut new_traces = Vec::new();
    for slots in sequences {
        let mut indices = Vec::with_capacity(slots.len());
        for slot in slots {
            indices.push(out.events.len());
            out.events.push(match slot {
                Slot::Keep(i) => log.events[i].clone(),
                Slot::New(e) => *e,
            });
        }
        new_traces.push(indices);
    }
    if let Some(traces) = &log.traces {
        out.traces = Some(
            traces
                .iter()
                .zip(new_traces)
                .map(|(t, events)| Trace {
                    id: t.id.clone(),
                    events,
                    attributes: t.attributes.clone(),
                })
                .collect(),
        );
    }
    Ok(out)
}

/// Replaces one trigger-terminated segment with the abstract event.
fn collapse(
    log: &UILog,
    rule: &AbstractionRule,
    group: NodeId,
    segment: &[usize],
    slots: &mut Vec<Slot>,
) {
    let trigger = &log.events[*segment.last().expect("segment ends at the trigger")];
    let mut latest: IndexMap<String, (usize, AttributeValue)> = IndexMap::new();
    for &i in segment {
        let e = &log.events[i];
        let (Some(value), Some(target)) = (&e.input_value, e.target) else {
            continue;
        };
        if target.level() != Level::Element {
            continue;
        }
        let id = &log.hierarchy.node(target.node()).expect("valid target").id;
        if rule.collect.is_empty() || rule.collect.contains(id) {
            latest.insert(id.clone(), (i, value.clone()));
        }
    }
    let mut map: IndexMap<String, AttributeValue> = IndexMap::new();
    if rule.collect.is_empty() {
        map.extend(latest.iter().map(|(k, (_, v))| (k.clone(), v.clone())));
    } else {
        for id in &rule.collect {
            if let Some((_, v)) = latest.get(id) {
                map.insert(id.clone(), v.clone());
            }
        }
    }
    let mut event = InteractionEvent::new(rule.abstract_name.clone())
        .with_action(NONE_ACTION)
        .with_target(TargetRef::Group(group));
    if !map.is_empty() {
        event.input_value = Some(AttributeValue::Map(map));
    }
    event.timestamp = trigger.timestamp;
    event.user = trigger.user.clone();
    event.task = trigger.task.clone();

    if !rule.drop_noise {
        let contributing: Vec<usize> = latest.values().map(|(i, _)| *i).collect();
        let trigger_index = *segment.last().expect("non-empty");
        slots.extend(
            segment
                .iter()
                .filter(|&&i| i != trigger_index && !contributing.contains(&i))
                .map(|&i| Slot::Keep(i)),
        );
    }
    slots.push(Slot::New(Box::new(event)));
}

/// Applies the rules one after another.
///
/// For each rule, every maximal run of consecutive events (within a trace) whose
/// target lies inside one node of the rule's group is cut after each trigger
/// event; each cut-off segment becomes one event named `abstract_name`, with action
/// `none`, the group as target, the trigger's timestamp, user and task, and a map
/// from element id to the latest input among the collected elements. Events after
/// the last trigger of a run are kept and reported as
/// [`AbstractionWarning::TriggerNeverFires`]. Without `drop_noise`, in-group events
/// that contributed nothing are kept in place ahead of the abstract event.
pub fn abstract_events(log: &UILog, rules: &[AbstractionRule]) -> Result<Abstracted, TransformError> {
    let mut warnings = Vec::new();
    let mut current = log.clone();
    for rule in rules {
        current = apply_rule(&current, rule, &mut warnings)?;
    }
    Ok(Abstracted {
        log: current,
        warnings,
    })
}
