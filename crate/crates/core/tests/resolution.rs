use proptest::prelude::*;
use uilog::testing::{random_associations, random_log, rng, LogConfig};
use uilog::{resolve_target, Associations, Level, ModelError, UIHierarchy};

/// Brute force: the lowest level that has an id, scanning from the element upwards.
fn oracle(a: &Associations) -> Option<(Level, String)> {
    let candidates = [
        (Level::Element, a.element.clone()),
        (Level::Group, a.groups.last().cloned()),
        (Level::Application, a.application.clone()),
        (Level::System, a.system.clone()),
    ];
    candidates.into_iter().find_map(|(l, id)| id.map(|id| (l, id)))
}

fn legal(a: &Associations) -> Associations {
    let mut a = a.clone();
    if a.has_orphaned_system() {
        a.system = None;
    }
    a
}

#[test]
fn thousand_events_match_the_oracle() {
    let mut r = rng(0x5eed);
    let mut h = UIHierarchy::new();
    let mut no_target = 0;
    for _ in 0..1000 {
        let a = random_associations(&mut r, true);
        match oracle(&a) {
            None => {
                assert!(matches!(resolve_target(&a, &h), Err(ModelError::NoTarget)));
                no_target += 1;
            }
            Some((level, id)) => {
                h.intern_associations(&legal(&a)).unwrap();
                let t = resolve_target(&a, &h).unwrap();
                assert_eq!(t.level(), level);
                assert_eq!(h.node(t.node()).unwrap().id, id);
                // the resolved node sits exactly on the recorded chain
                let l = legal(&a);
                let chain: Vec<&str> = l
                    .system
                    .iter()
                    .chain(l.application.iter())
                    .chain(l.groups.iter())
                    .chain(l.element.iter())
                    .map(String::as_str)
                    .rev()
                    .collect();
                assert_eq!(h.ancestry(t).unwrap(), chain);
            }
        }
    }
    assert!(no_target > 0, "the generator should produce empty associations");
}

#[test]
fn unknown_ids_dangle() {
    let h = UIHierarchy::new();
    let a = Associations {
        element: Some("ghost".into()),
        ..Default::default()
    };
    assert!(matches!(resolve_target(&a, &h), Err(ModelError::DanglingReference(_))));
}

proptest! {
    #[test]
    fn associations_of_a_target_resolve_back_to_it(seed in any::<u64>()) {
        let log = random_log(seed, &LogConfig { max_events: 40, ..LogConfig::default() });
        for e in &log.events {
            if let Some(t) = e.target {
                let a = log.hierarchy.associations(t).unwrap();
                prop_assert_eq!(resolve_target(&a, &log.hierarchy).unwrap(), t);
            }
        }
    }

    #[test]
    fn adding_a_lower_level_never_resolves_higher(seed in any::<u64>(), extra in "[a-z]{1,4}") {
        let mut r = rng(seed);
        let a = legal(&random_associations(&mut r, false));
        prop_assume!(a.element.is_none());
        let mut b = a.clone();
        b.element = Some(extra);
        let b = legal(&b);
        let mut h = UIHierarchy::new();
        h.intern_associations(&b).unwrap();
        let tb = resolve_target(&b, &h).unwrap();
        prop_assert_eq!(tb.level(), Level::Element);
        if let Ok(ta) = resolve_target(&a, &h) {
            prop_assert!(h.is_within(tb.node(), ta.node()));
        }
    }
}
