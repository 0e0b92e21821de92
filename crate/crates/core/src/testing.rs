//! Random valid logs for property tests.
//!
//! Generation is seed-driven ([`random_log`]) so that failures reproduce from the
//! seed alone; [`arb_log`] wraps it as a proptest strategy.

use chrono::{TimeDelta, TimeZone, Utc};
use indexmap::IndexMap;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Associations, AttributeSet, AttributeValue, InteractionEvent, NodeId, OrderCheck, TargetRef,
    Timestamp, Trace, UILog,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timestamps {
    Always,
    Sometimes,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracing {
    Traced,
    Untraced,
    Either,
}

#[derive(Debug, Clone)]
pub struct LogConfig {
    pub max_events: usize,
    /// Maximum number of nodes on a root-to-target path.
    pub max_depth: usize,
    pub timestamps: Timestamps,
    pub tracing: Tracing,
    /// Case attribute values are drawn from `u0..u{n}`; every event gets a user.
    pub users: usize,
    /// Nesting depth of generated attribute values.
    pub value_depth: usize,
    /// Use identifiers with XML, path and literal metacharacters.
    pub awkward_ids: bool,
}

impl Default for LogConfig {
    fn default() -> Self {
        LogConfig {
            max_events: 500,
            max_depth: 5,
            timestamps: Timestamps::Sometimes,
            tracing: Tracing::Either,
            users: 3,
            value_depth: 3,
            awkward_ids: true,
        }
    }
}

const PLAIN: &[&str] = &[
    "login", "mask", "confirm", "name", "dd", "type", "explorer", "tree", "ok", "panel", "x", "7",
];
const AWKWARD: &[&str] = &[
    "/", "\\", "<", ">", "&", "\"", "'", " ", ",", ":", "{", "}", "[", "]", "é", "中", "\t", "\n",
];

fn word(rng: &mut ChaCha8Rng, awkward: bool) -> String {
    let parts = rng.random_range(1..=3);
    let mut out = String::new();
    for _ in 0..parts {
        let pool = if awkward && rng.random_bool(0.3) { AWKWARD } else { PLAIN };
        out.push_str(pool.choose(rng).expect("non-empty pool"));
    }
    out
}

fn timestamp(rng: &mut ChaCha8Rng) -> Timestamp {
    let base = Utc.with_ymd_and_hms(2024, 3, 1, 8, 0, 0).single().expect("valid date");
    base + TimeDelta::milliseconds(rng.random_range(0..10_000_000_000))
}

pub fn random_value(rng: &mut ChaCha8Rng, depth: usize, awkward: bool) -> AttributeValue {
    let kinds = if depth == 0 { 5 } else { 7 };
    match rng.random_range(0..kinds) {
        0 => AttributeValue::Text(word(rng, awkward)),
        1 => AttributeValue::Int(rng.random_range(-1_000_000..1_000_000)),
        2 => AttributeValue::Real(rng.random_range(-1e6..1e6)),
        3 => AttributeValue::Bool(rng.random_bool(0.5)),
        4 => AttributeValue::Timestamp(timestamp(rng)),
        5 => AttributeValue::List(
            (0..rng.random_range(0..4))
                .map(|_| random_value(rng, depth - 1, awkward))
                .collect(),
        ),
        _ => {
            let mut map = IndexMap::new();
            for _ in 0..rng.random_range(0..4) {
                map.insert(word(rng, awkward), random_value(rng, depth - 1, awkward));
            }
            AttributeValue::Map(map)
        }
    }
}

fn random_attributes(rng: &mut ChaCha8Rng, cfg: &LogConfig, max: usize) -> AttributeSet {
    let mut set = AttributeSet::new();
    for _ in 0..rng.random_range(0..=max) {
        let key = format!("x:{}", word(rng, false));
        set.insert_unchecked(key, random_value(rng, cfg.value_depth.min(2), cfg.awkward_ids));
    }
    set
}

/// Random flat associations: each level independently present, up to three groups.
pub fn random_associations(rng: &mut ChaCha8Rng, awkward: bool) -> Associations {
    Associations {
        system: rng.random_bool(0.5).then(|| word(rng, awkward)),
        application: rng.random_bool(0.5).then(|| word(rng, awkward)),
        groups: (0..rng.random_range(0..=3)).map(|_| word(rng, awkward)).collect(),
        element: rng.random_bool(0.5).then(|| word(rng, awkward)),
    }
}

fn random_path(rng: &mut ChaCha8Rng, cfg: &LogConfig) -> Associations {
    loop {
        let mut a = random_associations(rng, cfg.awkward_ids);
        if a.has_orphaned_system() {
            a.system = None;
        }
        let depth = a.system.iter().count()
            + a.application.iter().count()
            + a.groups.len()
            + a.element.iter().count();
        if depth >= 1 && depth <= cfg.max_depth {
            return a;
        }
    }
}

/// A log that passes [`crate::validate`].
pub fn random_log(seed: u64, cfg: &LogConfig) -> UILog {
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let mut log = UILog::new();
    log.attributes = random_attributes(rng, cfg, 2);

    for _ in 0..rng.random_range(1..=12) {
        let path = random_path(rng, cfg);
        log.hierarchy.intern_associations(&path).expect("legal path");
    }
    let nodes: Vec<(NodeId, crate::model::Level)> =
        log.hierarchy.nodes().map(|(id, n)| (id, n.level)).collect();
    for &(id, level) in &nodes {
        if level == crate::model::Level::Element && rng.random_bool(0.3) {
            let state = random_value(rng, cfg.value_depth.min(2), cfg.awkward_ids);
            log.hierarchy.set_current_state(id, state).expect("element");
        }
        if rng.random_bool(0.2) {
            let attrs = random_attributes(rng, cfg, 2);
            log.hierarchy.attributes_mut(id).expect("node").merge(&attrs);
        }
    }
    for u in 0..cfg.users {
        log.ensure_user(&format!("u{u}")).expect("fresh user").attributes = random_attributes(rng, cfg, 1);
    }
    for t in 0..rng.random_range(0..3) {
        log.ensure_task(&format!("t{t}")).expect("fresh task");
    }
    let task_ids: Vec<String> = log.tasks.iter().map(|t| t.id.clone()).collect();

    let n = rng.random_range(0..=cfg.max_events);
    let mut clock = timestamp(rng);
    for _ in 0..n {
        let mut event = InteractionEvent::new(word(rng, cfg.awkward_ids));
        if rng.random_bool(0.8) {
            event = event.with_action(word(rng, cfg.awkward_ids));
        }
        if rng.random_bool(0.85) {
            let &(id, level) = nodes.choose(rng).expect("at least one node");
            event.target = Some(TargetRef::new(level, id));
        }
        if rng.random_bool(0.4) {
            event.input_value = Some(random_value(rng, cfg.value_depth, cfg.awkward_ids));
        }
        // occasional long pauses give time-gap segmentation something to split on
        let step = if rng.random_bool(0.05) {
            rng.random_range(600_000..7_200_000)
        } else {
            rng.random_range(0..120_000)
        };
        clock += TimeDelta::milliseconds(step);
        let stamped = match cfg.timestamps {
            Timestamps::Always => true,
            Timestamps::Sometimes => rng.random_bool(0.8),
            Timestamps::Never => false,
        };
        if stamped {
            event = event.at(clock);
        }
        if cfg.users > 0 {
            event.user = Some(format!("u{}", rng.random_range(0..cfg.users)));
        }
        if !task_ids.is_empty() && rng.random_bool(0.5) {
            event.task = task_ids.choose(rng).cloned();
        }
        event.attributes = random_attributes(rng, cfg, 2);
        log.append_event(event, OrderCheck::Strict).expect("valid event");
    }

    let traced = match cfg.tracing {
        Tracing::Traced => true,
        Tracing::Untraced => false,
        Tracing::Either => rng.random_bool(0.5),
    };
    if traced {
        let count = rng.random_range(1..=4);
        let mut traces: Vec<Trace> = (0..count)
            .map(|k| {
                let mut t = Trace::new(format!("case {k}"), Vec::new());
                t.attributes = random_attributes(rng, cfg, 1);
                t
            })
            .collect();
        for i in 0..log.events.len() {
            traces[rng.random_range(0..count)].events.push(i);
        }
        log.traces = Some(traces);
    }
    log
}

/// Proptest strategy over [`random_log`] seeds.
pub fn arb_log(cfg: LogConfig) -> impl Strategy<Value = UILog> {
    any::<u64>().prop_map(move |seed| random_log(seed, &cfg))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Where a seeded violation must be reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locator {
    Event(usize),
    Node(String),
}

/// A log with exactly one kind of invariant breach seeded into it.
#[derive(Debug, Clone)]
pub struct Mutation {
    pub name: &'static str,
    pub log: UILog,
    pub code: crate::ViolationCode,
    pub locator: Locator,
}

impl Mutation {
    /// The report contains the expected code at the expected locator, and nothing
    /// with another code.
    pub fn detected_by(&self, report: &crate::ValidationReport) -> bool {
        let located = report.violations.iter().any(|v| {
            v.code == self.code
                && match &self.locator {
                    Locator::Event(i) => v.event_index == Some(*i),
                    Locator::Node(id) => v.node_id.as_deref() == Some(id.as_str()),
                }
        });
        located && report.violations.iter().all(|v| v.code == self.code)
    }
}

/// One mutant per violation kind. `base` must be valid and have at least four
/// events, two root UI groups and one UI element.
pub fn mutation_suite(base: &UILog) -> Vec<Mutation> {
    use crate::model::{HierarchyNode, Level};
    use crate::ViolationCode as C;

    let nodes: Vec<HierarchyNode> = base.hierarchy.nodes().map(|(_, n)| n.clone()).collect();
    let roots: Vec<usize> = (0..nodes.len())
        .filter(|&i| nodes[i].level == Level::Group && nodes[i].parent.is_none())
        .collect();
    let element = (0..nodes.len())
        .find(|&i| nodes[i].level == Level::Element)
        .expect("an element");
    let (g0, g1) = (roots[0], roots[1]);
    let with_nodes = |f: &dyn Fn(&mut Vec<HierarchyNode>)| {
        let mut log = base.clone();
        let mut ns = nodes.clone();
        f(&mut ns);
        log.hierarchy = crate::UIHierarchy::from_nodes_unchecked(ns);
        log
    };
    let n = base.events.len();
    let mut out = Vec::new();

    let mut log = base.clone();
    log.events[3].activity_name.clear();
    out.push(Mutation { name: "empty activity name", log, code: C::MissingActivityName, locator: Locator::Event(3) });

    let mut log = base.clone();
    log.events[2].target = Some(TargetRef::Element(NodeId::from_index(nodes.len() + 7)));
    out.push(Mutation { name: "dangling reference", log, code: C::DanglingReference, locator: Locator::Event(2) });

    let log = with_nodes(&|ns| {
        ns[g0].parent = Some(NodeId::from_index(g1));
        ns[g1].parent = Some(NodeId::from_index(g0));
    });
    let id = nodes[g0.min(g1)].id.clone();
    out.push(Mutation { name: "cycle", log, code: C::CycleDetected, locator: Locator::Node(id) });

    let log = with_nodes(&|ns| ns[g1].parent = Some(NodeId::from_index(element)));
    out.push(Mutation { name: "level violation", log, code: C::LevelViolation, locator: Locator::Node(nodes[g1].id.clone()) });

    let mut log = base.clone();
    let t0 = Utc.with_ymd_and_hms(2024, 1, 1, 12, 0, 0).single().expect("valid date");
    for (i, e) in log.events.iter_mut().enumerate() {
        e.timestamp = Some(t0 + TimeDelta::seconds(i as i64));
    }
    // event 2 goes back in time relative to event 1
    log.events[1].timestamp = Some(t0 + TimeDelta::seconds(5));
    log.events[2].timestamp = Some(t0 + TimeDelta::seconds(4));
    log.events[3].timestamp = Some(t0 + TimeDelta::seconds(6));
    out.push(Mutation { name: "out-of-order timestamps", log, code: C::OutOfOrderTimestamp, locator: Locator::Event(2) });

    let log = with_nodes(&|ns| {
        let copy = ns[element].clone();
        ns.push(copy);
    });
    out.push(Mutation { name: "duplicate sibling id", log, code: C::DuplicateId, locator: Locator::Node(nodes[element].id.clone()) });

    let half = n / 2;
    let traced = |first: Vec<usize>, second: Vec<usize>| {
        let mut log = base.clone();
        log.traces = Some(vec![Trace::new("1", first), Trace::new("2", second)]);
        log
    };
    let log = traced((0..half).collect(), (half..n - 1).collect());
    out.push(Mutation { name: "partition gap", log, code: C::PartitionGap, locator: Locator::Event(n - 1) });

    let log = traced((0..half).collect(), (half - 1..n).collect());
    out.push(Mutation { name: "partition overlap", log, code: C::PartitionOverlap, locator: Locator::Event(half - 1) });

    out
}
