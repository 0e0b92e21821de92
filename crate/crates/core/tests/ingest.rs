use uilog::tabular::{ingest, ColumnMapping, ExtrasPolicy, Field, IngestError, NamingPreset};
use uilog::{validate, AttributeValue};

#[test]
fn names_are_synthesized_from_action_and_target() {
    let text = include_str!("../../../fixtures/recording.csv");
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let mut mapping = uilog::tabular::infer_mapping(&header).unwrap();
    mapping.naming = NamingPreset::Abbreviated;
    let (log, report) = ingest(text, &mapping).unwrap();
    assert_eq!(report.events_created, 9);
    assert_eq!(report.synthesized_names, 9);
    let names: Vec<&str> = log.events.iter().map(|e| e.activity_name.as_str()).collect();
    assert_eq!(names[..3], ["input username", "input password", "click login"]);
    assert_eq!(
        log.events[5].input_value,
        Some(AttributeValue::map([("name", "Smith"), ("city", "Graz")]))
    );
    // "search/filter" is a two-level group path under application "crm"
    let t = log.events[5].target.unwrap();
    assert_eq!(log.hierarchy.ancestry(t).unwrap(), ["query", "filter", "search", "crm"]);
    assert_eq!(log.users.len(), 2);
    assert!(validate(&log).is_valid());
}

#[test]
fn bad_rows_are_skipped_and_reported() {
    let text = "Timestamp,Activity,Input\n\
                2024-01-01T00:00:00Z,a,{x: 1}\n\
                yesterday,b,\n\
                2024-01-01T00:00:01Z,,\n\
                2024-01-01T00:00:02Z,d,{broken}\n";
    let mapping = ColumnMapping::default()
        .with_column(Field::Timestamp, "Timestamp")
        .with_column(Field::ActivityName, "Activity")
        .with_column(Field::InputValue, "Input");
    let (log, report) = ingest(text, &mapping).unwrap();
    assert_eq!(report.rows_read, 4);
    assert_eq!(log.len(), 2);
    let skipped: Vec<usize> = report.rows_skipped.iter().map(|s| s.row).collect();
    assert_eq!(skipped, [2, 3]);
    assert_eq!(log.events[1].input_value, Some(AttributeValue::text("{broken}")));
    assert_eq!(report.warnings.len(), 1);
}

#[test]
fn mapping_errors() {
    let m = ColumnMapping::default().with_column(Field::ActivityName, "Name");
    assert_eq!(ingest("Activity\nx\n", &m).unwrap_err(), IngestError::MissingColumn("Name".into()));
    let none = ColumnMapping::default().with_column(Field::Timestamp, "T");
    assert_eq!(ingest("T\n", &none).unwrap_err(), IngestError::NoUsableColumns);
}

#[test]
fn custom_format_delimiter_traces_and_extras() {
    let text = "case;when;what;where;note\n\
                c2;01.02.2024 10:00:00;open;menu;first\n\
                c1;01.02.2024 10:00:05;open;menu;\n\
                c2;01.02.2024 10:00:09;close;menu;x\n";
    let mapping = ColumnMapping::from_toml(
        r#"
        delimiter = ";"
        timestamp_format = "%d.%m.%Y %H:%M:%S"
        [columns]
        trace_id = "case"
        timestamp = "when"
        action_type = "what"
        ui_group_path = "where"
        "#,
    )
    .unwrap();
    let (log, _) = ingest(text, &mapping).unwrap();
    let traces = log.traces.as_ref().unwrap();
    assert_eq!(traces.iter().map(|t| t.id.as_str()).collect::<Vec<_>>(), ["c2", "c1"]);
    assert_eq!(traces[0].events, [0, 2]);
    assert_eq!(log.events[0].activity_name, "open menu");
    assert_eq!(log.events[0].attributes.get("note"), Some(&AttributeValue::text("first")));
    assert!(!log.events[1].attributes.contains_key("note"));

    let mut ignoring = mapping.clone();
    ignoring.extras = ExtrasPolicy::Ignore;
    let (log, _) = ingest(text, &ignoring).unwrap();
    assert!(log.events[0].attributes.is_empty());
}
