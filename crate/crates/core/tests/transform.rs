use std::collections::BTreeMap;

use chrono::{TimeDelta, TimeZone, Utc};
use proptest::prelude::*;
use uilog::tabular::{infer_mapping, ingest};
use uilog::testing::{arb_log, random_log, LogConfig, Timestamps, Tracing};
use uilog::transform::{
    abstract_events, flatten, segment, AbstractionRule, AbstractionWarning, CaseNotion, RuleSet,
    TransformError,
};
use uilog::{validate, AttributeValue, InteractionEvent, Level, OrderCheck, UILog};

fn load(text: &str) -> UILog {
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    ingest(text, &infer_mapping(&header).unwrap()).unwrap().0
}

fn at(secs: i64) -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap() + TimeDelta::seconds(secs)
}

fn partition(log: &UILog) -> Vec<Vec<usize>> {
    log.traces.as_ref().unwrap().iter().map(|t| t.events.clone()).collect()
}

/// Brute force: walk neighbouring pairs and cut where the gap exceeds the threshold.
fn gap_oracle(log: &UILog, threshold_ms: i64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..log.events.len() {
        let cut = i == 0
            || (log.events[i].timestamp.unwrap() - log.events[i - 1].timestamp.unwrap())
                .num_milliseconds()
                > threshold_ms;
        if cut {
            out.push(vec![]);
        }
        out.last_mut().unwrap().push(i);
    }
    out
}

/// Brute force: for each distinct value in order of first appearance, every index
/// holding it.
fn group_oracle(values: &[String]) -> Vec<Vec<usize>> {
    let mut seen: Vec<&String> = Vec::new();
    for v in values {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    seen.iter()
        .map(|s| (0..values.len()).filter(|&i| &values[i] == *s).collect())
        .collect()
}

fn timed_config() -> LogConfig {
    LogConfig {
        max_events: 200,
        timestamps: Timestamps::Always,
        tracing: Tracing::Untraced,
        ..LogConfig::default()
    }
}

#[test]
fn single_marker_gives_one_trace() {
    let log = load(include_str!("../../../fixtures/keyword_session.csv"));
    let seg = segment(&log, &CaseNotion::by_marker(["A_Login"])).unwrap();
    assert_eq!(partition(&seg), vec![(0..20).collect::<Vec<_>>()]);
    assert_eq!(seg.traces.as_ref().unwrap()[0].id, "1");
}

#[test]
fn gaps_split_where_stated() {
    let mut log = UILog::new();
    for s in [0, 5, 10, 300, 305] {
        log.append_event(InteractionEvent::new("e").at(at(s)), OrderCheck::Strict).unwrap();
    }
    let seg = segment(&log, &CaseNotion::by_time_gap(60.0)).unwrap();
    assert_eq!(partition(&seg), vec![vec![0, 1, 2], vec![3, 4]]);
    let ids: Vec<&str> = seg.traces.as_ref().unwrap().iter().map(|t| t.id.as_str()).collect();
    assert_eq!(ids, ["1", "2"]);
    // exactly the threshold does not split
    assert_eq!(partition(&segment(&log, &CaseNotion::by_time_gap(290.0)).unwrap()).len(), 1);
}

#[test]
fn alternating_users() {
    let mut log = UILog::new();
    log.ensure_user("u1").unwrap();
    log.ensure_user("u2").unwrap();
    for k in 0..6 {
        let u = if k % 2 == 0 { "u1" } else { "u2" };
        log.append_event(InteractionEvent::new("e").by_user(u), OrderCheck::Strict).unwrap();
    }
    let seg = segment(&log, &CaseNotion::by_attribute("user")).unwrap();
    assert_eq!(partition(&seg), vec![vec![0, 2, 4], vec![1, 3, 5]]);
    assert!(validate(&seg).is_valid());
}

#[test]
fn missing_inputs_are_reported() {
    let mut log = UILog::new();
    log.append_event(InteractionEvent::new("a").at(at(0)), OrderCheck::Strict).unwrap();
    log.append_event(InteractionEvent::new("b"), OrderCheck::Strict).unwrap();
    assert_eq!(
        segment(&log, &CaseNotion::by_time_gap(1.0)).unwrap_err(),
        TransformError::MissingTimestamps { events: vec![1] }
    );
    assert!(matches!(
        segment(&log, &CaseNotion::by_attribute("session")),
        Err(TransformError::MissingCaseAttribute { events, .. }) if events == vec![0, 1]
    ));
    assert!(segment(&log, &CaseNotion::by_time_gap(0.0)).is_err());
}

#[test]
fn composite_refines_left_to_right() {
    let log = load(include_str!("../../../fixtures/recording.csv"));
    let notion = CaseNotion::from_toml(include_str!("../../../fixtures/session_notion.toml")).unwrap();
    let seg = segment(&log, &notion).unwrap();
    let ids: Vec<&str> = seg.traces.as_ref().unwrap().iter().map(|t| t.id.as_str()).collect();
    assert_eq!(ids, ["alice/1", "alice/2", "bob/1", "bob/2"]);
    assert_eq!(partition(&seg), vec![vec![0, 1, 2, 5, 6], vec![7], vec![3, 4], vec![8]]);
}

#[test]
fn flatten_concatenates_by_trace_start() {
    let mut log = UILog::new();
    for s in [0, 10, 5, 15] {
        log.append_event(InteractionEvent::new(format!("t{s}")).at(at(s)), OrderCheck::Lenient)
            .unwrap();
    }
    log.traces = Some(vec![
        uilog::Trace::new("b", vec![2, 3]),
        uilog::Trace::new("a", vec![0, 1]),
    ]);
    let flat = flatten(&log);
    let names: Vec<&str> = flat.events.iter().map(|e| e.activity_name.as_str()).collect();
    assert_eq!(names, ["t0", "t10", "t5", "t15"]);
    assert!(flat.traces.is_none());
    let untraced = flatten(&flat);
    assert_eq!(untraced.view(), flat.view());
}

fn login_rule() -> AbstractionRule {
    RuleSet::from_toml(include_str!("../../../fixtures/login_rule.toml")).unwrap().rules[0].clone()
}

#[test]
fn raw_login_collapses_to_a_login() {
    let raw = load(include_str!("../../../fixtures/keyword_session_raw.csv"));
    assert_eq!(raw.len(), 23);
    let out = abstract_events(&raw, &[login_rule()]).unwrap();
    assert!(out.warnings.is_empty());
    let log = out.log;
    assert_eq!(log.len(), 20);
    let first = &log.events[0];
    assert_eq!(first.activity_name, "A_Login");
    assert_eq!(first.action_type(), Some("none"));
    assert_eq!(first.target.unwrap().level(), Level::Group);
    assert_eq!(
        first.input_value,
        Some(AttributeValue::map([("username", "pren"), ("password", "dts123")]))
    );
    assert!(validate(&log).is_valid());
    let again = abstract_events(&log, &[login_rule()]).unwrap();
    assert_eq!(again.log.view(), log.view());
}

#[test]
fn keeping_noise() {
    let raw = load(include_str!("../../../fixtures/keyword_session_raw.csv"));
    let out = abstract_events(&raw, &[login_rule().keep_noise()]).unwrap().log;
    let names: Vec<&str> = out.events[..2].iter().map(|e| e.activity_name.as_str()).collect();
    assert_eq!(names, ["input password", "A_Login"]);
    assert_eq!(out.events[0].input_value, Some(AttributeValue::text("wrong")));
    assert_eq!(out.len(), 21);
}

#[test]
fn two_visits_give_two_events() {
    let raw = load(include_str!("../../../fixtures/keyword_session_raw.csv"));
    let mut twice = raw.clone();
    for i in 0..4 {
        let e = raw.events[i].clone();
        twice.append_event(e, OrderCheck::Strict).unwrap();
    }
    let out = abstract_events(&twice, &[login_rule()]).unwrap().log;
    let logins: Vec<usize> = (0..out.len()).filter(|&i| out.events[i].activity_name == "A_Login").collect();
    assert_eq!(logins, vec![0, out.len() - 1]);
}

#[test]
fn unconfirmed_work_is_kept() {
    let raw = load(include_str!("../../../fixtures/keyword_session_raw.csv"));
    let mut unconfirmed = raw.clone();
    unconfirmed.events.remove(3);
    let out = abstract_events(&unconfirmed, &[login_rule()]).unwrap();
    assert_eq!(out.log.view(), unconfirmed.view());
    assert_eq!(
        out.warnings,
        vec![AbstractionWarning::TriggerNeverFires {
            rule: "A_Login".into(),
            trace: None,
            events: vec![0, 1, 2],
        }]
    );
}

#[test]
fn untouched_groups_and_unknown_groups() {
    let log = load(include_str!("../../../fixtures/keyword_session.csv"));
    let out = abstract_events(&log, &[login_rule()]).unwrap();
    assert_eq!(out.log.view(), log.view());
    let bad = AbstractionRule::new("no such group", "x", "A_X");
    assert_eq!(
        abstract_events(&log, &[bad]).unwrap_err(),
        TransformError::UnknownGroup("no such group".into())
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_gap_matches_scanner(seed in any::<u64>(), threshold in 1u32..3600) {
        let log = random_log(seed, &timed_config());
        let seg = segment(&log, &CaseNotion::by_time_gap(threshold as f64)).unwrap();
        prop_assert_eq!(partition(&seg), gap_oracle(&log, threshold as i64 * 1000));
    }

    #[test]
    fn attribute_matches_grouping(seed in any::<u64>()) {
        let log = random_log(seed, &timed_config());
        let seg = segment(&log, &CaseNotion::by_attribute("user")).unwrap();
        let values: Vec<String> = log.events.iter().map(|e| e.user.clone().unwrap()).collect();
        prop_assert_eq!(partition(&seg), group_oracle(&values));
    }

    #[test]
    fn segment_preserves_events(log in arb_log(LogConfig { max_events: 120, users: 2, ..LogConfig::default() }),
                                marker in "[a-z]{1,3}") {
        let notion = CaseNotion::Composite { parts: vec![
            CaseNotion::by_attribute("user"),
            CaseNotion::by_marker([marker]),
        ]};
        let seg = segment(&log, &notion).unwrap();
        prop_assert!(validate(&seg).is_valid());
        // same event storage; the partition is a refinement keeping relative order
        prop_assert_eq!(&seg.events, &log.events);
        let mut all: Vec<usize> = partition(&seg).concat();
        for t in partition(&seg) {
            prop_assert!(t.windows(2).all(|w| w[0] < w[1]) || log.is_traced());
        }
        all.sort();
        prop_assert_eq!(all, (0..log.len()).collect::<Vec<_>>());
        // flatten then multiset equality
        let mut a: Vec<String> = flatten(&seg).events.iter().map(|e| format!("{e:?}")).collect();
        let mut b: Vec<String> = log.events.iter().map(|e| format!("{e:?}")).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn attribute_segmentation_ignores_reordering_across_values(seed in any::<u64>(), swaps in prop::collection::vec(0usize..200, 0..40)) {
        let log = random_log(seed, &timed_config());
        prop_assume!(log.len() > 1);
        // swap neighbours with different users: the per-user subsequences stay the same
        let mut shuffled = log.clone();
        for s in swaps {
            let i = s % (shuffled.len() - 1);
            if shuffled.events[i].user != shuffled.events[i + 1].user {
                shuffled.events.swap(i, i + 1);
            }
        }
        let per_user = |l: &UILog| -> BTreeMap<String, Vec<String>> {
            let seg = segment(l, &CaseNotion::by_attribute("user")).unwrap();
            seg.traces.unwrap().into_iter()
                .map(|t| (t.id, t.events.iter().map(|&i| format!("{:?}", seg.events[i])).collect()))
                .collect()
        };
        prop_assert_eq!(per_user(&log), per_user(&shuffled));
    }

    #[test]
    fn abstraction_shrinks_validates_and_is_idempotent(log in arb_log(LogConfig { max_events: 150, awkward_ids: false, ..LogConfig::default() })) {
        let groups: Vec<String> = log.hierarchy.nodes()
            .filter(|(_, n)| n.level == Level::Group)
            .map(|(_, n)| n.id.clone())
            .collect();
        prop_assume!(!groups.is_empty());
        let trigger = log.events.iter().find(|e| e.target.is_some()).map(|e| e.activity_name.clone()).unwrap_or_else(|| "never".into());
        let rules = vec![AbstractionRule::new(groups[0].clone(), trigger, "A_Task")];
        let once = abstract_events(&log, &rules).unwrap().log;
        prop_assert!(once.len() <= log.len());
        let report = validate(&once);
        prop_assert!(report.is_valid(), "{}", report.render_text());
        let twice = abstract_events(&once, &rules).unwrap().log;
        prop_assert_eq!(twice.view(), once.view());
    }
}
