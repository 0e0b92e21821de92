use super::{
    Associations, AttributeSet, AttributeValue, InteractionEvent, Level, ModelError, TaskRef,
    Timestamp, UIHierarchy, UserRef,
};

/// One case: an ordered list of indices into [`UILog::events`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub id: String,
    pub events: Vec<usize>,
    pub attributes: AttributeSet,
}

impl Trace {
    pub fn new(id: impl Into<String>, events: Vec<usize>) -> Self {
        Trace {
            id: id.into(),
            events,
            attributes: AttributeSet::new(),
        }
    }
}

/// Whether [`UILog::append_event`] rejects timestamps earlier than the last one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderCheck {
    #[default]
    Strict,
    Lenient,
}

/// A user-interaction log.
///
/// Fields are public so that callers (and the validator's tests) can assemble any
/// structure; [`UILog::append_event`] and the registry helpers are the checked path,
/// and [`crate::validation::validate`] reports every invariant breach of a log built
/// by other means.
#[derive(Debug, Clone, Default)]
pub struct UILog {
    pub events: Vec<InteractionEvent>,
    pub hierarchy: UIHierarchy,
    pub users: Vec<UserRef>,
    pub tasks: Vec<TaskRef>,
    pub attributes: AttributeSet,
    /// `None` for an untraced log; otherwise a partition of event indices.
    pub traces: Option<Vec<Trace>>,
}

impl UILog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn is_traced(&self) -> bool {
        self.traces.is_some()
    }

    pub fn user(&self, id: &str) -> Option<&UserRef> {
        self.users.iter().find(|u| u.id == id)
    }

    pub fn task(&self, id: &str) -> Option<&TaskRef> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn add_user(&mut self, user: UserRef) -> Result<(), ModelError> {
        if user.id.is_empty() {
            return Err(ModelError::EmptyIdentifier("user id"));
        }
        if self.user(&user.id).is_some() {
            return Err(ModelError::DuplicateId {
                what: "user",
                id: user.id,
            });
        }
        self.users.push(user);
        Ok(())
    }

    pub fn add_task(&mut self, task: TaskRef) -> Result<(), ModelError> {
        if task.id.is_empty() {
            return Err(ModelError::EmptyIdentifier("task id"));
        }
        if self.task(&task.id).is_some() {
            return Err(ModelError::DuplicateId {
                what: "task",
                id: task.id,
            });
        }
        self.tasks.push(task);
        Ok(())
    }

    /// Registers the user if unknown; returns a mutable handle either way.
    pub fn ensure_user(&mut self, id: &str) -> Result<&mut UserRef, ModelError> {
        if self.user(id).is_none() {
            self.add_user(UserRef::new(id))?;
        }
        Ok(self.users.iter_mut().find(|u| u.id == id).expect("present"))
    }

    pub fn ensure_task(&mut self, id: &str) -> Result<&mut TaskRef, ModelError> {
        if self.task(id).is_none() {
            self.add_task(TaskRef::new(id))?;
        }
        Ok(self.tasks.iter_mut().find(|t| t.id == id).expect("present"))
    }

    /// Appends an event after checking it and its references. On a traced log the
    /// event joins the last trace (a trace `"1"` is opened if there is none).
    ///
    /// With [`OrderCheck::Strict`], a timestamp earlier than the latest timestamp of
    /// the receiving sequence is rejected. On error the log is left untouched.
    pub fn append_event(
        &mut self,
        event: InteractionEvent,
        order: OrderCheck,
    ) -> Result<usize, ModelError> {
        event.check()?;
        if let Some(t) = event.target {
            self.hierarchy
                .check_target(t)
                .map_err(|e| ModelError::UnresolvedReference(e.to_string()))?;
        }
        if let Some(u) = &event.user {
            if self.user(u).is_none() {
                return Err(ModelError::UnresolvedReference(format!("user `{u}`")));
            }
        }
        if let Some(t) = &event.task {
            if self.task(t).is_none() {
                return Err(ModelError::UnresolvedReference(format!("task `{t}`")));
            }
        }
        if order == OrderCheck::Strict {
            if let (Some(ts), Some(prev)) = (event.timestamp, self.last_timestamp()) {
                if ts < prev {
                    return Err(ModelError::OutOfOrderTimestamp {
                        timestamp: super::format_timestamp(&ts),
                        previous: super::format_timestamp(&prev),
                    });
                }
            }
        }
        Ok(self.push_event_unchecked(event))
    }

    /// Appends without any checks, placing the event like [`UILog::append_event`].
    pub fn push_event_unchecked(&mut self, event: InteractionEvent) -> usize {
        let index = self.events.len();
        self.events.push(event);
        if let Some(traces) = &mut self.traces {
            if traces.is_empty() {
                traces.push(Trace::new("1", Vec::new()));
            }
            traces.last_mut().expect("non-empty").events.push(index);
        }
        index
    }

    /// Latest timestamp of the sequence a new event would join.
    fn last_timestamp(&self) -> Option<Timestamp> {
        match &self.traces {
            Some(traces) => traces
                .last()
                .and_then(|t| t.events.iter().rev().find_map(|&i| self.events[i].timestamp)),
            None => self.events.iter().rev().find_map(|e| e.timestamp),
        }
    }

    /// Event indices in case order: trace by trace, or the whole log when untraced.
    pub fn sequences(&self) -> Vec<Vec<usize>> {
        match &self.traces {
            Some(traces) => traces.iter().map(|t| t.events.clone()).collect(),
            None => vec![(0..self.events.len()).collect()],
        }
    }

    /// Stable timestamp sort within each sequence. Events without a timestamp keep
    /// their slot; timestamped events are sorted among the remaining slots.
    pub fn sorted_by_timestamp(&self) -> UILog {
        let mut out = self.clone();
        for seq in self.sequences() {
            let slots: Vec<usize> = seq
                .iter()
                .copied()
                .filter(|&i| self.events[i].timestamp.is_some())
                .collect();
            let mut order = slots.clone();
            order.sort_by_key(|&i| self.events[i].timestamp);
            for (slot, src) in slots.into_iter().zip(order) {
                out.events[slot] = self.events[src].clone();
            }
        }
        out
    }

    /// Flat hierarchy context of an event, if it has a resolvable target.
    pub fn associations_of(&self, event: &InteractionEvent) -> Option<Associations> {
        event
            .target
            .and_then(|t| self.hierarchy.associations(t).ok())
    }

    /// Identity-free structural snapshot, used to compare logs whose hierarchies were
    /// built in different orders (for example after an interchange round trip).
    pub fn view(&self) -> LogView {
        let events = |idx: &[usize]| idx.iter().map(|&i| self.event_view(i)).collect();
        let traces = match &self.traces {
            Some(ts) => TraceView::Traced(
                ts.iter()
                    .map(|t| (t.id.clone(), t.attributes.clone(), events(&t.events)))
                    .collect(),
            ),
            None => TraceView::Untraced(events(&(0..self.events.len()).collect::<Vec<_>>())),
        };
        LogView {
            attributes: self.attributes.clone(),
            traces,
        }
    }

    fn event_view(&self, index: usize) -> EventView {
        let e = &self.events[index];
        let target = e.target.map(|t| {
            let mut path: Vec<NodeView> = self
                .hierarchy
                .ancestor_ids(t.node())
                .unwrap_or_default()
                .into_iter()
                .filter_map(|nid| self.hierarchy.node(nid))
                .map(|n| NodeView {
                    level: n.level,
                    id: n.id.clone(),
                    current_state: n.current_state.clone(),
                    attributes: n.attributes.clone(),
                })
                .collect();
            path.reverse();
            path
        });
        EventView {
            activity_name: e.activity_name.clone(),
            timestamp: e.timestamp,
            action: e
                .action
                .as_ref()
                .map(|a| (a.action_type.clone(), a.attributes.clone())),
            target,
            input_value: e.input_value.clone(),
            user: e.user.as_ref().map(|u| {
                let attrs = self.user(u).map(|r| r.attributes.clone()).unwrap_or_default();
                (u.clone(), attrs)
            }),
            task: e.task.as_ref().map(|t| {
                let attrs = self.task(t).map(|r| r.attributes.clone()).unwrap_or_default();
                (t.clone(), attrs)
            }),
            attributes: e.attributes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeView {
    pub level: Level,
    pub id: String,
    pub current_state: Option<AttributeValue>,
    pub attributes: AttributeSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventView {
    pub activity_name: String,
    pub timestamp: Option<Timestamp>,
    pub action: Option<(String, AttributeSet)>,
    /// Target path, root first.
    pub target: Option<Vec<NodeView>>,
    pub input_value: Option<AttributeValue>,
    pub user: Option<(String, AttributeSet)>,
    pub task: Option<(String, AttributeSet)>,
    pub attributes: AttributeSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceView {
    Untraced(Vec<EventView>),
    Traced(Vec<(String, AttributeSet, Vec<EventView>)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogView {
    pub attributes: AttributeSet,
    pub traces: TraceView,
}
