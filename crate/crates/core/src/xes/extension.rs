use super::document::push_line;
use super::keys;

/// Declared XES types per key, in output order. Polymorphic keys are declared once
/// per admissible type.
const DEFINITIONS: [(&str, &[&str], &str); 9] = [
    ("action-type", &["string"], "Action type"),
    ("input-value", &["string", "list", "container"], "Input value"),
    ("ui-element", &["string"], "UI element"),
    ("ui-element-state", &["string", "list", "container"], "UI element current state"),
    ("ui-group-path", &["string"], "UI group path"),
    ("application", &["string"], "Application"),
    ("system", &["string"], "System"),
    ("user", &["string"], "User"),
    ("task", &["string"], "Task"),
];

/// The `uilog` extension definition document. The output is a fixed constant.
pub fn emit_extension_definition() -> String {
    let mut out = String::new();
    push_line(&mut out, 0, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    push_line(
        &mut out,
        0,
        &format!(
            r#"<xesextension name="{}" prefix="{}" uri="{}">"#,
            keys::EXTENSION_NAME,
            keys::PREFIX,
            keys::EXTENSION_URI
        ),
    );
    push_line(&mut out, 1, "<log>");
    push_line(&mut out, 2, r#"<boolean key="untraced">"#);
    push_line(&mut out, 3, r#"<alias mapping="EN" name="Single artificial trace"/>"#);
    push_line(&mut out, 2, "</boolean>");
    push_line(&mut out, 1, "</log>");
    push_line(&mut out, 1, "<event>");
    for (key, types, label) in DEFINITIONS {
        for ty in types {
            push_line(&mut out, 2, &format!(r#"<{ty} key="{key}">"#));
            push_line(&mut out, 3, &format!(r#"<alias mapping="EN" name="{label}"/>"#));
            push_line(&mut out, 2, &format!("</{ty}>"));
        }
    }
    push_line(&mut out, 1, "</event>");
    push_line(&mut out, 0, "</xesextension>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declares_every_event_key() {
        let def = emit_extension_definition();
        assert!(def.contains(r#"prefix="uilog""#));
        for key in keys::EVENT_KEYS {
            let local = key.strip_prefix("uilog:").unwrap();
            assert!(def.contains(&format!(r#"key="{local}""#)), "missing {key}");
        }
        assert!(def.contains(r#"<container key="input-value">"#));
        assert!(def.contains(r#"<string key="input-value">"#));
        assert!(def.contains(r#"<list key="ui-element-state">"#));
        assert_eq!(def, emit_extension_definition());
    }
}
