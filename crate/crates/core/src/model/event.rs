use super::{truncate_millis, AttributeSet, AttributeValue, ModelError, TargetRef, Timestamp};

/// Action type recorded for events that do not stem from a single input, such as
/// abstracted task-level events.
pub const NONE_ACTION: &str = "none";

/// What the user does. The action type domain is open.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub action_type: String,
    pub attributes: AttributeSet,
}

impl Action {
    pub fn new(action_type: impl Into<String>) -> Self {
        Action {
            action_type: action_type.into(),
            attributes: AttributeSet::new(),
        }
    }

    pub fn none() -> Self {
        Self::new(NONE_ACTION)
    }

    pub fn is_none_type(&self) -> bool {
        self.action_type == NONE_ACTION
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserRef {
    pub id: String,
    pub attributes: AttributeSet,
}

impl UserRef {
    pub fn new(id: impl Into<String>) -> Self {
        UserRef {
            id: id.into(),
            attributes: AttributeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskRef {
    pub id: String,
    pub attributes: AttributeSet,
}

impl TaskRef {
    pub fn new(id: impl Into<String>) -> Self {
        TaskRef {
            id: id.into(),
            attributes: AttributeSet::new(),
        }
    }
}

/// One activity instance. Only `activity_name` is required.
///
/// `user` and `task` hold ids into the owning log's registries; `target` points into
/// its hierarchy.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InteractionEvent {
    pub activity_name: String,
    pub action: Option<Action>,
    pub target: Option<TargetRef>,
    pub input_value: Option<AttributeValue>,
    pub timestamp: Option<Timestamp>,
    pub user: Option<String>,
    pub task: Option<String>,
    pub attributes: AttributeSet,
}

impl InteractionEvent {
    pub fn new(activity_name: impl Into<String>) -> Self {
        InteractionEvent {
            activity_name: activity_name.into(),
            ..Default::default()
        }
    }

    pub fn with_action(mut self, action_type: impl Into<String>) -> Self {
        self.action = Some(Action::new(action_type));
        self
    }

    pub fn with_target(mut self, target: TargetRef) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_input(mut self, value: impl Into<AttributeValue>) -> Self {
        self.input_value = Some(value.into());
        self
    }

    /// Sets the timestamp, truncated to milliseconds.
    pub fn at(mut self, ts: Timestamp) -> Self {
        self.timestamp = Some(truncate_millis(ts).0);
        self
    }

    pub fn by_user(mut self, user: impl Into<String>) -> Self {
        self.user = Some(user.into());
        self
    }

    pub fn in_task(mut self, task: impl Into<String>) -> Self {
        self.task = Some(task.into());
        self
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<AttributeValue>) -> Self {
        self.attributes.insert(key, value).expect("invalid attribute");
        self
    }

    pub fn action_type(&self) -> Option<&str> {
        self.action.as_ref().map(|a| a.action_type.as_str())
    }

    /// Event-local invariants, without looking at the owning log.
    pub fn check(&self) -> Result<(), ModelError> {
        if self.activity_name.is_empty() {
            return Err(ModelError::EmptyIdentifier("activity name"));
        }
        if let Some(action) = &self.action {
            if action.action_type.is_empty() {
                return Err(ModelError::EmptyIdentifier("action type"));
            }
            action.attributes.check()?;
        }
        if let Some(v) = &self.input_value {
            v.check()?;
        }
        if matches!(&self.user, Some(u) if u.is_empty()) {
            return Err(ModelError::EmptyIdentifier("user id"));
        }
        if matches!(&self.task, Some(t) if t.is_empty()) {
            return Err(ModelError::EmptyIdentifier("task id"));
        }
        self.attributes.check()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_only_event_is_valid() {
        assert!(InteractionEvent::new("A_Login").check().is_ok());
        assert_eq!(
            InteractionEvent::new("").check(),
            Err(ModelError::EmptyIdentifier("activity name"))
        );
    }

    #[test]
    fn none_action_is_a_real_value() {
        let e = InteractionEvent::new("A_Login").with_action(NONE_ACTION);
        assert_eq!(e.action_type(), Some("none"));
        assert!(e.action.as_ref().unwrap().is_none_type());
        assert_eq!(InteractionEvent::new("x").action_type(), None);
        assert!(InteractionEvent::new("x").with_action("").check().is_err());
    }
}
