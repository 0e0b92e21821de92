use uilog::stats::{coverage, profile, CoreAttribute};
use uilog::tabular::{infer_mapping, ingest, write_table, ColumnMapping};
use uilog::xes::{read_xes, write_xes};
use uilog::{validate, AttributeValue, Level};

const SESSION: &str = include_str!("../../../fixtures/keyword_session.csv");

fn load() -> uilog::UILog {
    let header: Vec<&str> = SESSION.lines().next().unwrap().split(',').collect();
    let mapping = infer_mapping(&header).unwrap();
    let (log, report) = ingest(SESSION, &mapping).unwrap();
    assert!(report.rows_skipped.is_empty(), "{}", report.render_text());
    assert!(report.warnings.is_empty(), "{}", report.render_text());
    log
}

#[test]
fn ingests_twenty_valid_events() {
    let log = load();
    assert_eq!(log.len(), 20);
    assert!(!log.is_traced());
    let report = validate(&log);
    assert!(report.is_valid(), "{}", report.render_text());
}

#[test]
fn coverage_matches_the_table() {
    let cov = coverage(&load());
    let present = |a| cov.get(a).events_present;
    assert_eq!(present(CoreAttribute::InputValue), 5);
    assert_eq!(present(CoreAttribute::CurrentState), 4);
    assert_eq!(present(CoreAttribute::TargetElement), 17);
    assert_eq!(present(CoreAttribute::ActionType), 20);
    assert_eq!(present(CoreAttribute::UiHierarchy), 17);
    assert_eq!(present(CoreAttribute::Application), 0);
    assert_eq!(present(CoreAttribute::Timestamp), 0);
    assert!(cov.entries.iter().all(|e| e.events_total == 20));
}

#[test]
fn profile_matches_the_table() {
    let p = profile(&load());
    assert_eq!(p.events, 20);
    assert_eq!(p.ui_groups, 6);
    assert_eq!(p.none_actions, 2);
    // "confirm" lives in two groups and so is two nodes
    assert_eq!(p.ui_elements, 13);
    assert_eq!(p.distinct_action_types, 5);
    // two activity names recur (the dropdown clicks and "click keywords node expand"
    // twice, "click confirm" in two groups): 20 rows, 16 names
    assert_eq!(p.distinct_activities, 16);
    assert_eq!(p.applications, 0);
    assert_eq!(p.systems, 0);
}

#[test]
fn structured_cells() {
    let log = load();
    assert_eq!(
        log.events[0].input_value,
        Some(AttributeValue::map([("username", "pren"), ("password", "dts123")]))
    );
    let dd = log.events[11].target.unwrap();
    assert_eq!(dd.level(), Level::Element);
    assert_eq!(
        log.hierarchy.node(dd.node()).unwrap().current_state,
        Some(AttributeValue::list(["keyword", "keywords folder"]))
    );
    let f5 = log.events[17].target.unwrap();
    assert_eq!(f5.level(), Level::Group);
    assert_eq!(log.hierarchy.ancestry(dd).unwrap(), vec!["dd type", "fpanel keyword"]);
}

#[test]
fn xes_round_trip() {
    let log = load();
    let xml = write_xes(&log).unwrap();
    assert!(xml.contains(r#"<string key="uilog:untraced""#) || xml.contains(r#"<boolean key="uilog:untraced" value="true"/>"#));
    let back = read_xes(&xml).unwrap();
    assert_eq!(back.view(), log.view());
    assert_eq!(write_xes(&back).unwrap(), xml);
}

#[test]
fn table_writer_is_the_inverse() {
    let log = load();
    let text = write_table(&log, &ColumnMapping::canonical()).unwrap();
    let header: Vec<String> = text.lines().next().unwrap().split(',').map(str::to_string).collect();
    let (back, report) = ingest(&text, &infer_mapping(&header).unwrap()).unwrap();
    assert!(report.rows_skipped.is_empty());
    assert_eq!(back.view(), log.view());
}
