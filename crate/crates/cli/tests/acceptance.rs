//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if
//! any criterion fails.

use std::cell::Cell;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use uilog::stats::{coverage, profile, CoreAttribute};
use uilog::tabular::{infer_mapping, ingest};
use uilog::testing::{
    arb_log, mutation_suite, random_associations, random_log, rng, LogConfig, Timestamps, Tracing,
};
use uilog::transform::{abstract_events, segment, CaseNotion, RuleSet};
use uilog::xes::{emit_extension_definition, read_xes, write_xes};
use uilog::{resolve_target, validate, Associations, AttributeValue, Level, ModelError, UIHierarchy, UILog};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture present")
}

fn ingest_inferred(text: &str) -> Result<UILog, String> {
    let header: Vec<&str> = text.lines().next().unwrap_or_default().split(',').collect();
    let mapping = infer_mapping(&header).map_err(|e| e.to_string())?;
    let (log, report) = ingest(text, &mapping).map_err(|e| e.to_string())?;
    if !report.rows_skipped.is_empty() {
        return Err(format!("rows skipped: {:?}", report.rows_skipped));
    }
    Ok(log)
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn deterministic_runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn reference_log_reproduction() -> Outcome {
    let start = Instant::now();
    let log = ingest_inferred(&read_fixture("keyword_session.csv"))?;
    let report = validate(&log);
    let cov = coverage(&log);
    let prof = profile(&log);
    let elapsed = start.elapsed();
    let present = |a| cov.get(a).events_present;
    let observed = [
        ("events", log.len(), 20),
        ("violations", report.violations.len(), 0),
        ("input_value", present(CoreAttribute::InputValue), 5),
        ("current_state", present(CoreAttribute::CurrentState), 4),
        ("target_element", present(CoreAttribute::TargetElement), 17),
        ("ui groups", prof.ui_groups, 6),
        ("none actions", prof.none_actions, 2),
    ];
    for (what, got, want) in observed {
        check(got == want, || format!("{what}: got {got}, want {want}"))?;
    }
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("20 events, 0 violations, 5/4/17 coverage, 6 groups, 2 none, {elapsed:.1?}"))
}

fn round_trip_suite() -> Outcome {
    let start = Instant::now();
    let mut runner = deterministic_runner(200);
    let cfg = LogConfig::default();
    let events = Cell::new(0usize);
    let max_events = Cell::new(0usize);
    let structured = Cell::new(0usize);
    let result = runner.run(&arb_log(cfg), |log| {
        events.set(events.get() + log.len());
        max_events.set(max_events.get().max(log.len()));
        structured.set(
            structured.get()
                + log
                    .events
                    .iter()
                    .filter(|e| matches!(e.input_value, Some(AttributeValue::Map(_) | AttributeValue::List(_))))
                    .count(),
        );
        let back = read_xes(&write_xes(&log).expect("valid log writes")).expect("own output reads");
        assert_eq!(back.len(), log.len(), "event count");
        let (a, b) = (log.view(), back.view());
        let flat = |v: &uilog::model::LogView| match &v.traces {
            uilog::model::TraceView::Untraced(es) => vec![es.clone()],
            uilog::model::TraceView::Traced(ts) => ts.iter().map(|(_, _, es)| es.clone()).collect(),
        };
        let (fa, fb) = (flat(&a), flat(&b));
        let sizes = |f: &Vec<Vec<uilog::model::EventView>>| f.iter().map(Vec::len).collect::<Vec<_>>();
        assert_eq!(sizes(&fa), sizes(&fb), "trace partition");
        for (ea, eb) in fa.iter().flatten().zip(fb.iter().flatten()) {
            assert_eq!(ea.activity_name, eb.activity_name, "name");
            assert_eq!(ea.timestamp, eb.timestamp, "timestamp");
            assert_eq!(ea.target, eb.target, "target path");
            assert_eq!(ea.input_value, eb.input_value, "input value");
        }
        assert_eq!(a, b, "full structural view");
        Ok(())
    });
    let elapsed = start.elapsed();
    result.map_err(|e| e.to_string())?;
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "200 logs, {} events (max {}), {} structured inputs, {elapsed:.1?}",
        events.get(),
        max_events.get(),
        structured.get()
    ))
}

fn most_specific(a: &Associations) -> Option<(Level, String)> {
    [
        (Level::Element, a.element.clone()),
        (Level::Group, a.groups.last().cloned()),
        (Level::Application, a.application.clone()),
        (Level::System, a.system.clone()),
    ]
    .into_iter()
    .find_map(|(l, id)| id.map(|id| (l, id)))
}

fn resolution_oracle() -> Outcome {
    let mut r = rng(20240301);
    let mut h = UIHierarchy::new();
    let (mut matched, mut empty) = (0, 0);
    for k in 0..1000 {
        let a = random_associations(&mut r, true);
        match most_specific(&a) {
            None => {
                check(matches!(resolve_target(&a, &h), Err(ModelError::NoTarget)), || {
                    format!("event {k}: empty associations did not raise NoTarget")
                })?;
                empty += 1;
            }
            Some((level, id)) => {
                let mut legal = a.clone();
                if legal.has_orphaned_system() {
                    legal.system = None;
                }
                h.intern_associations(&legal).map_err(|e| format!("event {k}: {e}"))?;
                let t = resolve_target(&a, &h).map_err(|e| format!("event {k}: {e}"))?;
                let got = (t.level(), h.node(t.node()).expect("resolved").id.clone());
                check(got == (level, id.clone()), || {
                    format!("event {k}: resolved {got:?}, oracle ({level:?}, {id:?})")
                })?;
                matched += 1;
            }
        }
    }
    Ok(format!("{matched} resolved as the oracle, {empty} raised NoTarget"))
}

fn abstraction_fixture() -> Outcome {
    let raw = ingest_inferred(&read_fixture("keyword_session_raw.csv"))?;
    let rules = RuleSet::from_toml(&read_fixture("login_rule.toml")).map_err(|e| e.to_string())?;
    let login_rows = raw.events.iter().take_while(|e| e.activity_name != "A_Profile Selection").count();
    check(login_rows == 4, || format!("raw login sequence has {login_rows} events"))?;
    let out = abstract_events(&raw, &rules.rules).map_err(|e| e.to_string())?;
    let log = out.log;
    let logins: Vec<_> = log.events.iter().filter(|e| e.activity_name == "A_Login").collect();
    check(logins.len() == 1, || format!("{} A_Login events", logins.len()))?;
    let e = logins[0];
    check(e.action_type() == Some("none"), || format!("action {:?}", e.action_type()))?;
    let want = AttributeValue::map([("username", "pren"), ("password", "dts123")]);
    check(e.input_value.as_ref() == Some(&want), || format!("input {:?}", e.input_value))?;
    check(raw.len() - log.len() == 3, || format!("{} -> {} events", raw.len(), log.len()))?;
    let report = validate(&log);
    check(report.is_valid(), || report.render_text())?;
    let twice = abstract_events(&log, &rules.rules).map_err(|e| e.to_string())?;
    check(twice.log.view() == log.view(), || "second application changed the log".into())?;
    Ok(format!("{} -> {} events, one A_Login {want}, idempotent", raw.len(), log.len()))
}

fn gap_scan(log: &UILog, threshold_ms: i64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..log.events.len() {
        let gap = i > 0
            && (log.events[i].timestamp.unwrap() - log.events[i - 1].timestamp.unwrap())
                .num_milliseconds()
                > threshold_ms;
        if i == 0 || gap {
            out.push(Vec::new());
        }
        out.last_mut().unwrap().push(i);
    }
    out
}

fn group_by_value(values: &[String]) -> Vec<Vec<usize>> {
    let mut keys: Vec<&String> = Vec::new();
    for v in values {
        if !keys.contains(&v) {
            keys.push(v);
        }
    }
    keys.into_iter()
        .map(|k| (0..values.len()).filter(|&i| &values[i] == k).collect())
        .collect()
}

fn segmentation_oracle() -> Outcome {
    let cfg = LogConfig {
        max_events: 300,
        timestamps: Timestamps::Always,
        tracing: Tracing::Untraced,
        ..LogConfig::default()
    };
    let mut cases = 0;
    let mut traces = 0;
    for seed in 0..200u64 {
        let log = random_log(seed, &cfg);
        let threshold = 30 + (seed % 50) * 60;
        let parts = |l: &UILog| -> Vec<Vec<usize>> {
            l.traces.as_ref().unwrap().iter().map(|t| t.events.clone()).collect()
        };
        let by_gap = segment(&log, &CaseNotion::by_time_gap(threshold as f64)).map_err(|e| e.to_string())?;
        check(parts(&by_gap) == gap_scan(&log, threshold as i64 * 1000), || {
            format!("seed {seed}: time-gap partition differs from the scanner")
        })?;
        let by_user = segment(&log, &CaseNotion::by_attribute("user")).map_err(|e| e.to_string())?;
        let users: Vec<String> = log.events.iter().map(|e| e.user.clone().unwrap()).collect();
        check(parts(&by_user) == group_by_value(&users), || {
            format!("seed {seed}: attribute partition differs from the grouping")
        })?;
        for seg in [&by_gap, &by_user] {
            check(seg.events == log.events, || format!("seed {seed}: events changed"))?;
            let mut all: Vec<usize> = parts(seg).concat();
            check(parts(seg).iter().all(|t| t.windows(2).all(|w| w[0] < w[1])), || {
                format!("seed {seed}: within-trace order broken")
            })?;
            all.sort_unstable();
            check(all == (0..log.len()).collect::<Vec<_>>(), || {
                format!("seed {seed}: partition not exact")
            })?;
            traces += parts(seg).len();
        }
        cases += 1;
    }
    Ok(format!("{cases} logs, {traces} traces, identical to both oracles"))
}

fn validator_sensitivity() -> Outcome {
    let base = ingest_inferred(&read_fixture("keyword_session.csv"))?;
    let clean = validate(&base);
    check(clean.violations.is_empty(), || clean.render_text())?;
    let suite = mutation_suite(&base);
    for m in &suite {
        let report = validate(&m.log);
        check(m.detected_by(&report), || format!("{}: {}", m.name, report.render_text()))?;
    }
    let names: Vec<&str> = suite.iter().map(|m| m.name).collect();
    Ok(format!("{} mutants caught ({})", suite.len(), names.join(", ")))
}

fn extension_stability() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_uilog"))
            .arg("extension")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    check(a.status.success() && b.status.success(), || "extension failed".into())?;
    check(a.stdout == b.stdout, || "two runs differ".into())?;
    check(a.stdout == emit_extension_definition().as_bytes(), || "binary differs from library".into())?;
    let golden = std::fs::read(fixture("uilog.xesext")).map_err(|e| e.to_string())?;
    check(a.stdout == golden, || "output differs from the checked-in copy".into())?;
    let text = String::from_utf8(a.stdout).map_err(|_| "not UTF-8".to_string())?;
    check(!text.contains('\r'), || "platform line endings".into())?;
    Ok(format!("{} bytes, identical across runs and to the golden copy", text.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("reference log reproduction", reference_log_reproduction),
        ("XES round-trip property suite", round_trip_suite),
        ("target-resolution oracle equivalence", resolution_oracle),
        ("abstraction fixture", abstraction_fixture),
        ("segmentation oracle equivalence", segmentation_oracle),
        ("validator sensitivity", validator_sensitivity),
        ("extension stability", extension_stability),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
