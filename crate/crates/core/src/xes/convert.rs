//! Mapping between [`UILog`] and the generic XES document tree.
//!
//! Activity names and timestamps travel as `concept:name` / `time:timestamp`; every
//! other standard attribute becomes a `uilog:*` event attribute. Attributes of the
//! action, hierarchy nodes, user and task ride along as nested attributes of the
//! corresponding key. Group attributes are nested below `uilog:ui-group-path` in
//! containers keyed by the group's depth (`"0"` is the outermost group).

use std::collections::HashMap;

use indexmap::IndexMap;

use super::document::{XesAttribute, XesDocument, XesEvent, XesExtensionDecl, XesTrace, XesValue};
use super::keys;
use super::XesError;
use crate::model::{
    Action, Associations, AttributeSet, AttributeValue, InteractionEvent, Level, NodeId,
    OrderCheck, Trace, UILog, MAX_NESTING_DEPTH,
};
use crate::path::{decode_group_path, encode_group_path};

const LIST_ITEM_KEY: &str = "item";

fn value_to_xes(key: &str, v: &AttributeValue) -> XesAttribute {
    match v {
        AttributeValue::Text(s) => XesAttribute::new(key, XesValue::String(s.clone())),
        AttributeValue::Int(i) => XesAttribute::new(key, XesValue::Int(*i)),
        AttributeValue::Real(r) => XesAttribute::new(key, XesValue::Float(*r)),
        AttributeValue::Bool(b) => XesAttribute::new(key, XesValue::Boolean(*b)),
        AttributeValue::Timestamp(t) => XesAttribute::new(key, XesValue::Date(*t)),
        AttributeValue::List(items) => XesAttribute::new(
            key,
            XesValue::List(items.iter().map(|i| value_to_xes(LIST_ITEM_KEY, i)).collect()),
        ),
        AttributeValue::Map(entries) => XesAttribute::new(key, XesValue::Container)
            .with_children(entries.iter().map(|(k, v)| value_to_xes(k, v)).collect()),
    }
}

fn checked_value_to_xes(key: &str, v: &AttributeValue) -> Result<XesAttribute, XesError> {
    if v.depth() > MAX_NESTING_DEPTH {
        return Err(XesError::UnserializableValue(format!(
            "`{key}` nests {} levels deep (limit {MAX_NESTING_DEPTH})",
            v.depth()
        )));
    }
    Ok(value_to_xes(key, v))
}

fn set_to_xes(set: &AttributeSet) -> Result<Vec<XesAttribute>, XesError> {
    set.iter().map(|(k, v)| checked_value_to_xes(k, v)).collect()
}

fn user_attributes(
    set: &AttributeSet,
    reserved: impl Fn(&str) -> bool,
    scope: &str,
) -> Result<Vec<XesAttribute>, XesError> {
    if let Some(k) = set.keys().find(|k| reserved(k)) {
        return Err(XesError::ReservedKey(format!("{scope} attribute `{k}`")));
    }
    set_to_xes(set)
}

fn event_to_xes(log: &UILog, e: &InteractionEvent) -> Result<XesEvent, XesError> {
    let mut attrs = vec![XesAttribute::string(keys::CONCEPT_NAME, &e.activity_name)];
    if let Some(ts) = e.timestamp {
        attrs.push(XesAttribute::new(keys::TIME_TIMESTAMP, XesValue::Date(ts)));
    }
    if let Some(a) = &e.action {
        attrs.push(
            XesAttribute::string(keys::ACTION_TYPE, &a.action_type)
                .with_children(set_to_xes(&a.attributes)?),
        );
    }
    if let Some(v) = &e.input_value {
        attrs.push(checked_value_to_xes(keys::INPUT_VALUE, v)?);
    }
    if let Some(t) = e.target {
        let h = &log.hierarchy;
        h.check_target(t)
            .map_err(|err| XesError::UnserializableValue(err.to_string()))?;
        let path = h
            .ancestor_ids(t.node())
            .map_err(|err| XesError::UnserializableValue(err.to_string()))?;
        let node = |nid: NodeId| h.node(nid).expect("checked ancestry");
        let mut groups: Vec<NodeId> = Vec::new();
        let (mut element, mut app, mut system) = (None, None, None);
        for &nid in &path {
            match node(nid).level {
                Level::Element => element = Some(nid),
                Level::Group => groups.push(nid),
                Level::Application => app = Some(nid),
                Level::System => system = Some(nid),
            }
        }
        groups.reverse();
        if let Some(el) = element {
            let n = node(el);
            attrs.push(
                XesAttribute::string(keys::UI_ELEMENT, &n.id)
                    .with_children(set_to_xes(&n.attributes)?),
            );
            if let Some(state) = &n.current_state {
                attrs.push(checked_value_to_xes(keys::UI_ELEMENT_STATE, state)?);
            }
        }
        if !groups.is_empty() {
            let ids: Vec<&str> = groups.iter().map(|&g| node(g).id.as_str()).collect();
            let mut nested = Vec::new();
            for (depth, &g) in groups.iter().enumerate() {
                let n = node(g);
                if !n.attributes.is_empty() {
                    nested.push(
                        XesAttribute::new(depth.to_string(), XesValue::Container)
                            .with_children(set_to_xes(&n.attributes)?),
                    );
                }
            }
            attrs.push(
                XesAttribute::string(keys::UI_GROUP_PATH, encode_group_path(&ids))
                    .with_children(nested),
            );
        }
        for (nid, key) in [(app, keys::APPLICATION), (system, keys::SYSTEM)] {
            if let Some(nid) = nid {
                let n = node(nid);
                attrs.push(
                    XesAttribute::string(key, &n.id).with_children(set_to_xes(&n.attributes)?),
                );
            }
        }
    }
    if let Some(u) = &e.user {
        let extra = log.user(u).map(|r| set_to_xes(&r.attributes)).transpose()?;
        attrs.push(XesAttribute::string(keys::USER, u).with_children(extra.unwrap_or_default()));
    }
    if let Some(t) = &e.task {
        let extra = log.task(t).map(|r| set_to_xes(&r.attributes)).transpose()?;
        attrs.push(XesAttribute::string(keys::TASK, t).with_children(extra.unwrap_or_default()));
    }
    attrs.extend(user_attributes(&e.attributes, keys::is_reserved, "event")?);
    Ok(XesEvent { attributes: attrs })
}

/// Builds the XES tree for a log. Does not run validation; see [`super::write_xes`].
pub fn log_to_document(log: &UILog) -> Result<XesDocument, XesError> {
    let extensions = vec![
        XesExtensionDecl {
            name: "Concept".into(),
            prefix: "concept".into(),
            uri: keys::CONCEPT_URI.into(),
        },
        XesExtensionDecl {
            name: "Time".into(),
            prefix: "time".into(),
            uri: keys::TIME_URI.into(),
        },
        XesExtensionDecl {
            name: keys::EXTENSION_NAME.into(),
            prefix: keys::PREFIX.into(),
            uri: keys::EXTENSION_URI.into(),
        },
    ];
    let mut attributes = Vec::new();
    if log.traces.is_none() {
        attributes.push(XesAttribute::new(keys::UNTRACED, XesValue::Boolean(true)));
    }
    attributes.extend(user_attributes(
        &log.attributes,
        |k| k.starts_with("uilog:"),
        "log",
    )?);

    let event = |i: usize| {
        let e = log.events.get(i).ok_or_else(|| {
            XesError::UnserializableValue(format!("trace references missing event {i}"))
        })?;
        event_to_xes(log, e)
    };
    let traces = match &log.traces {
        None if log.events.is_empty() => Vec::new(),
        None => vec![XesTrace {
            attributes: Vec::new(),
            events: (0..log.events.len()).map(event).collect::<Result<_, _>>()?,
        }],
        Some(traces) => traces
            .iter()
            .map(|t| {
                let mut attributes = vec![XesAttribute::string(keys::CONCEPT_NAME, &t.id)];
                attributes.extend(user_attributes(
                    &t.attributes,
                    |k| k == keys::CONCEPT_NAME || k.starts_with("uilog:"),
                    "trace",
                )?);
                Ok(XesTrace {
                    attributes,
                    events: t.events.iter().map(|&i| event(i)).collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<_, XesError>>()?,
    };
    Ok(XesDocument {
        extensions,
        attributes,
        traces,
    })
}

/// Reader configuration.
#[derive(Debug, Clone, Default)]
pub struct ReadOptions {
    /// Alternative attribute keys mapped onto canonical ones before interpretation,
    /// e.g. `"uilog:actionType" -> "uilog:action-type"`.
    pub aliases: HashMap<String, String>,
    /// Load events without `concept:name` with an empty activity name instead of
    /// failing, so that validation can report them.
    pub allow_missing_names: bool,
}

impl ReadOptions {
    pub fn alias(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.aliases.insert(from.into(), to.into());
        self
    }
}

fn xes_to_value(a: &XesAttribute, depth: usize) -> Result<AttributeValue, XesError> {
    if depth > MAX_NESTING_DEPTH {
        return Err(XesError::MalformedDocument(format!(
            "attribute `{}` nests deeper than {MAX_NESTING_DEPTH} levels",
            a.key
        )));
    }
    Ok(match &a.value {
        XesValue::String(s) | XesValue::Id(s) => AttributeValue::Text(s.clone()),
        XesValue::Date(t) => AttributeValue::Timestamp(*t),
        XesValue::Int(i) => AttributeValue::Int(*i),
        XesValue::Float(f) => AttributeValue::Real(*f),
        XesValue::Boolean(b) => AttributeValue::Bool(*b),
        XesValue::List(items) => AttributeValue::List(
            items
                .iter()
                .map(|i| xes_to_value(i, depth + 1))
                .collect::<Result<_, _>>()?,
        ),
        XesValue::Container => {
            let mut map = IndexMap::new();
            for c in &a.children {
                if c.key.is_empty() {
                    return Err(XesError::MalformedDocument(format!(
                        "container `{}` has an entry with an empty key",
                        a.key
                    )));
                }
                if map.insert(c.key.clone(), xes_to_value(c, depth + 1)?).is_some() {
                    return Err(XesError::MalformedDocument(format!(
                        "container `{}` repeats key `{}`",
                        a.key, c.key
                    )));
                }
            }
            AttributeValue::Map(map)
        }
    })
}

fn xes_to_set(attrs: &[XesAttribute], scope: &str) -> Result<AttributeSet, XesError> {
    let mut set = AttributeSet::new();
    for a in attrs {
        if set.contains_key(&a.key) {
            return Err(XesError::MalformedDocument(format!(
                "{scope} repeats attribute key `{}`",
                a.key
            )));
        }
        set.insert(a.key.clone(), xes_to_value(a, 0)?)
            .map_err(|e| XesError::MalformedDocument(format!("{scope}: {e}")))?;
    }
    Ok(set)
}

fn text_of(a: &XesAttribute) -> Result<&str, XesError> {
    a.text().ok_or_else(|| {
        XesError::MalformedDocument(format!("`{}` must be a string attribute", a.key))
    })
}

struct EventReader<'a> {
    options: &'a ReadOptions,
    log: UILog,
    warnings: Vec<String>,
}

impl EventReader<'_> {
    fn read_event(
        &mut self,
        ev: &XesEvent,
        trace_index: usize,
        event_index: usize,
    ) -> Result<usize, XesError> {
        let options = self.options;
        let mut by_key: IndexMap<&str, &XesAttribute> = IndexMap::new();
        for a in &ev.attributes {
            let key = options
                .aliases
                .get(&a.key)
                .map(String::as_str)
                .unwrap_or(&a.key);
            if by_key.insert(key, a).is_some() {
                return Err(XesError::MalformedDocument(format!(
                    "event {event_index} of trace {trace_index} repeats key `{key}`"
                )));
            }
        }
        let where_ = format!("event {event_index} of trace {trace_index}");

        let name = match by_key.shift_remove(keys::CONCEPT_NAME) {
            Some(a) => text_of(a)?.to_string(),
            None => String::new(),
        };
        if name.is_empty() && !self.options.allow_missing_names {
            return Err(XesError::MissingConceptName {
                trace: trace_index,
                event: event_index,
            });
        }
        let mut event = InteractionEvent::new(name);

        if let Some(a) = by_key.shift_remove(keys::TIME_TIMESTAMP) {
            event.timestamp = Some(match &a.value {
                XesValue::Date(t) => *t,
                _ => {
                    return Err(XesError::MalformedDocument(format!(
                        "{where_}: time:timestamp must be a date"
                    )))
                }
            });
        }
        if let Some(a) = by_key.shift_remove(keys::ACTION_TYPE) {
            event.action = Some(Action {
                action_type: text_of(a)?.to_string(),
                attributes: xes_to_set(&a.children, &where_)?,
            });
        }
        if let Some(a) = by_key.shift_remove(keys::INPUT_VALUE) {
            event.input_value = Some(xes_to_value(a, 0)?);
        }

        let element = by_key.shift_remove(keys::UI_ELEMENT);
        let state = by_key.shift_remove(keys::UI_ELEMENT_STATE);
        let groups = by_key.shift_remove(keys::UI_GROUP_PATH);
        let app = by_key.shift_remove(keys::APPLICATION);
        let system = by_key.shift_remove(keys::SYSTEM);
        let mut assoc = Associations {
            system: system.map(text_of).transpose()?.map(str::to_string),
            application: app.map(text_of).transpose()?.map(str::to_string),
            groups: match groups {
                Some(g) => decode_group_path(text_of(g)?)
                    .map_err(|e| XesError::MalformedDocument(format!("{where_}: {e}")))?,
                None => Vec::new(),
            },
            element: element.map(text_of).transpose()?.map(str::to_string),
        };
        let mut system = system;
        if assoc.has_orphaned_system() {
            self.warnings.push(format!(
                "{where_}: system `{}` dropped, no application links it to the UI groups/element",
                assoc.system.as_deref().unwrap_or_default()
            ));
            assoc.system = None;
            system = None;
        }
        if let Some(target) = self
            .log
            .hierarchy
            .intern_associations(&assoc)
            .map_err(|e| XesError::MalformedDocument(format!("{where_}: {e}")))?
        {
            let path = self
                .log
                .hierarchy
                .ancestor_ids(target.node())
                .expect("freshly interned");
            // path runs bottom-up; groups appear innermost first
            let mut group_nodes: Vec<NodeId> = path
                .iter()
                .copied()
                .filter(|&n| self.log.hierarchy.node(n).map(|x| x.level) == Some(Level::Group))
                .collect();
            group_nodes.reverse();
            let levels: Vec<(NodeId, Level)> = path
                .iter()
                .filter_map(|&n| self.log.hierarchy.node(n).map(|x| (n, x.level)))
                .collect();
            let level_node = |lvl: Level| levels.iter().find(|(_, l)| *l == lvl).map(|(n, _)| *n);
            let mut nested = Vec::new();
            if let (Some(a), Some(n)) = (element, level_node(Level::Element)) {
                nested.push((n, xes_to_set(&a.children, &where_)?));
            }
            if let (Some(a), Some(n)) = (app, level_node(Level::Application)) {
                nested.push((n, xes_to_set(&a.children, &where_)?));
            }
            if let (Some(a), Some(n)) = (system, level_node(Level::System)) {
                nested.push((n, xes_to_set(&a.children, &where_)?));
            }
            if let Some(g) = groups {
                for c in &g.children {
                    let node = c
                        .key
                        .parse::<usize>()
                        .ok()
                        .and_then(|d| group_nodes.get(d).copied())
                        .ok_or_else(|| {
                            XesError::MalformedDocument(format!(
                                "{where_}: group attributes under unknown depth `{}`",
                                c.key
                            ))
                        })?;
                    let set = match c.value {
                        XesValue::Container => xes_to_set(&c.children, &where_)?,
                        _ => {
                            return Err(XesError::MalformedDocument(format!(
                                "{where_}: group attributes must be containers"
                            )))
                        }
                    };
                    nested.push((node, set));
                }
            }
            for (node, set) in nested {
                if let Some(attrs) = self.log.hierarchy.attributes_mut(node) {
                    attrs.merge(&set);
                }
            }
            if let Some(s) = state {
                match level_node(Level::Element) {
                    Some(n) => {
                        let v = xes_to_value(s, 0)?;
                        let prev = self
                            .log
                            .hierarchy
                            .set_current_state(n, v.clone())
                            .map_err(|e| XesError::MalformedDocument(e.to_string()))?;
                        if prev.is_some_and(|p| p != v) {
                            self.warnings.push(format!(
                                "{where_}: element state changed; keeping the latest"
                            ));
                        }
                    }
                    None => self
                        .warnings
                        .push(format!("{where_}: element state without an element ignored")),
                }
            }
            event.target = Some(target);
        } else if state.is_some() {
            self.warnings
                .push(format!("{where_}: element state without an element ignored"));
        }

        let context_err = |e: crate::model::ModelError| {
            XesError::MalformedDocument(format!("{where_}: {e}"))
        };
        if let Some(a) = by_key.shift_remove(keys::USER) {
            let id = text_of(a)?.to_string();
            let set = xes_to_set(&a.children, &where_)?;
            self.log.ensure_user(&id).map_err(context_err)?.attributes.merge(&set);
            event.user = Some(id);
        }
        if let Some(a) = by_key.shift_remove(keys::TASK) {
            let id = text_of(a)?.to_string();
            let set = xes_to_set(&a.children, &where_)?;
            self.log.ensure_task(&id).map_err(context_err)?.attributes.merge(&set);
            event.task = Some(id);
        }

        for (key, a) in by_key {
            if key.starts_with("uilog:") {
                self.warnings
                    .push(format!("{where_}: unknown extension key `{key}` dropped"));
                continue;
            }
            event
                .attributes
                .insert(key, xes_to_value(a, 0)?)
                .map_err(|e| XesError::MalformedDocument(format!("{where_}: {e}")))?;
        }

        if event.activity_name.is_empty() {
            // only reachable with allow_missing_names; validation reports it
            return Ok(self.log.push_event_unchecked(event));
        }
        self.log
            .append_event(event, OrderCheck::Lenient)
            .map_err(|e| XesError::MalformedDocument(format!("{where_}: {e}")))
    }
}

/// Rebuilds a log from a document tree. Returns the log and reader warnings.
pub fn document_to_log(
    doc: &XesDocument,
    options: &ReadOptions,
) -> Result<(UILog, Vec<String>), XesError> {
    let mut log_attrs = Vec::new();
    let mut untraced = false;
    let mut warnings = Vec::new();
    for a in &doc.attributes {
        let key = options.aliases.get(&a.key).map(String::as_str).unwrap_or(&a.key);
        if key == keys::UNTRACED {
            untraced = matches!(a.value, XesValue::Boolean(true));
        } else if key.starts_with("uilog:") {
            warnings.push(format!("unknown log-level extension key `{key}` dropped"));
        } else {
            log_attrs.push(a.clone());
        }
    }
    if untraced && doc.traces.len() > 1 {
        warnings.push(format!(
            "log is marked untraced but holds {} traces; keeping them",
            doc.traces.len()
        ));
        untraced = false;
    }

    let mut reader = EventReader {
        options,
        log: UILog::new(),
        warnings,
    };
    reader.log.attributes = xes_to_set(&log_attrs, "log")?;
    let mut traces = Vec::new();
    for (ti, t) in doc.traces.iter().enumerate() {
        let mut attrs = Vec::new();
        let mut id = None;
        for a in &t.attributes {
            if a.key == keys::CONCEPT_NAME {
                id = Some(text_of(a)?.to_string());
            } else {
                attrs.push(a.clone());
            }
        }
        let mut indices = Vec::with_capacity(t.events.len());
        for (ei, e) in t.events.iter().enumerate() {
            indices.push(reader.read_event(e, ti, ei)?);
        }
        if !untraced {
            let id = id.unwrap_or_else(|| {
                reader
                    .warnings
                    .push(format!("trace {ti} has no concept:name; named by position"));
                format!("trace-{ti}")
            });
            let mut trace = Trace::new(id, indices);
            trace.attributes = xes_to_set(&attrs, "trace")?;
            traces.push(trace);
        }
    }
    let mut log = reader.log;
    if !untraced {
        log.traces = Some(traces);
    }
    Ok((log, reader.warnings))
}
