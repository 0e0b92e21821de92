use indexmap::IndexMap;

use super::NONE_ACTION;

/// How activity names are derived from an action type and a target id.
///
/// The action type is first passed through the rewrite table (if it has an entry),
/// then joined to the target id with `separator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamingScheme {
    pub separator: String,
    pub rewrites: IndexMap<String, String>,
}

impl Default for NamingScheme {
    fn default() -> Self {
        NamingScheme {
            separator: " ".to_string(),
            rewrites: IndexMap::new(),
        }
    }
}

impl NamingScheme {
    /// Space-separated concatenation with the usual click abbreviations:
    /// `left click` becomes `click` and `right click` becomes `rclick`.
    pub fn abbreviated() -> Self {
        let mut scheme = Self::default();
        scheme.rewrites.insert("left click".into(), "click".into());
        scheme.rewrites.insert("right click".into(), "rclick".into());
        scheme
    }

    pub fn with_rewrite(mut self, action_type: impl Into<String>, token: impl Into<String>) -> Self {
        self.rewrites.insert(action_type.into(), token.into());
        self
    }
}

/// Derives an activity name. An empty action type is treated as `none`.
pub fn make_activity_name(action_type: &str, target_id: &str, naming: &NamingScheme) -> String {
    let action_type = if action_type.is_empty() {
        NONE_ACTION
    } else {
        action_type
    };
    let token = naming
        .rewrites
        .get(action_type)
        .map(String::as_str)
        .unwrap_or(action_type);
    let mut name = String::with_capacity(token.len() + naming.separator.len() + target_id.len());
    name.push_str(token);
    name.push_str(&naming.separator);
    name.push_str(target_id);
    name
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_concatenation() {
        let d = NamingScheme::default();
        assert_eq!(make_activity_name("input", "name", &d), "input name");
        assert_eq!(make_activity_name("KEY_F5", "explorer tree", &d), "KEY_F5 explorer tree");
        assert_eq!(make_activity_name("", "confirm", &d), "none confirm");
    }

    #[test]
    fn rewrite_tables() {
        let click = NamingScheme::default().with_rewrite("left click", "click");
        assert_eq!(make_activity_name("left click", "confirm", &click), "click confirm");
        let rclick = NamingScheme::default().with_rewrite("right click", "rclick");
        assert_eq!(make_activity_name("right click", "keywords", &rclick), "rclick keywords");
        let abbr = NamingScheme::abbreviated();
        assert_eq!(make_activity_name("input", "name", &abbr), "input name");
        assert_eq!(
            make_activity_name("left click", "dd type", &abbr),
            "click dd type"
        );
    }
}
