use std::collections::{BTreeMap, BTreeSet};

use mmt::learner::{Learner, LearnerConfig};
use mmt::mmt::{Mmt, StateId, TimerId, Update};
use mmt::models;
use mmt::obs_tree::{ApartCase, Matching, NodeId, ObsTree, ReplayOutcome, TreeAction, TreeUpdate};
use mmt::random::{random_mmt, RandomSpec};
use mmt::symbolic::run_of_symbolic;
use mmt::teacher::Teacher;

/// The two-timer tree after a few queries: basis t0, t1, t3.
fn small_tree() -> ObsTree {
    let mut t = ObsTree::new(vec!["i".into()]);
    let i = TreeAction::Input(0);
    let to = TreeAction::Timeout;
    let edges = [
        (0, i, "o", TreeUpdate::Start(1, 2)),
        (1, to(1), "o", TreeUpdate::Start(1, 2)),
        (1, i, "o'", TreeUpdate::Start(3, 3)),
        (2, to(1), "o", TreeUpdate::Unknown),
        (3, to(1), "o", TreeUpdate::Start(1, 2)),
        (3, i, "o'", TreeUpdate::Start(6, 2)),
        (5, to(1), "o", TreeUpdate::Unknown),
        (5, to(3), "o", TreeUpdate::Unknown),
        (6, to(6), "o", TreeUpdate::Unknown),
        (6, to(3), "o", TreeUpdate::Unknown),
    ];
    for (k, (p, a, o, u)) in edges.into_iter().enumerate() {
        assert_eq!(t.add_child(p, a, o, u).unwrap(), k + 1);
    }
    for q in [0, 1, 2, 3, 5, 6] {
        t.mark_explored(q);
    }
    t.recompute_active();
    t
}

fn set(xs: &[NodeId]) -> BTreeSet<NodeId> {
    xs.iter().copied().collect()
}

fn matching(pairs: &[(NodeId, NodeId)]) -> Matching {
    pairs.iter().copied().collect()
}

#[test]
fn small_tree_active_sets() {
    let t = small_tree();
    assert_eq!(*t.active(1), set(&[1]));
    assert_eq!(*t.active(2), set(&[1]));
    assert_eq!(*t.active(3), set(&[1, 3]));
    assert_eq!(*t.active(5), set(&[1, 3]));
    assert_eq!(*t.active(6), set(&[3, 6]));
    for q in [0, 4, 7, 8, 9, 10] {
        assert!(t.active(q).is_empty(), "t{q}");
    }
    assert_eq!(*t.enabled(1), set(&[1]));
    assert_eq!(*t.enabled(6), set(&[3, 6]));
}

#[test]
fn copy_run_follows_fresh_timers() {
    let t = small_tree();
    let (nodes, ext) = t.copy_run(&Matching::new(), 0, 2, 3).unwrap();
    assert_eq!(nodes, vec![6, 9]);
    assert_eq!(ext, matching(&[(1, 6), (2, 9)]));
}

#[test]
fn apartness_verdicts() {
    let t = small_tree();
    let w = t.check_apart(&Matching::new(), 0, 3).unwrap();
    assert_eq!((w.end, w.copy, w.case), (1, 6, ApartCase::Outputs));

    let w = t.check_apart(&Matching::new(), 1, 6).unwrap();
    assert_eq!((w.end, w.copy, w.case), (1, 6, ApartCase::Sizes));

    let m = matching(&[(1, 3)]);
    assert!(t.classify(&m, 1, 3, 5).contains(&ApartCase::Structural));
    assert!(t.classify(&m, 1, 3, 3).contains(&ApartCase::Constants));
    assert_eq!(t.check_apart(&m, 1, 3).unwrap().case, ApartCase::Structural);
}

#[test]
fn compatible_sets() {
    let tree = small_tree();
    let mut l = Learner::from_tree(tree, set(&[0, 1, 3]), LearnerConfig::default());
    assert_eq!(l.frontier(), vec![2, 5, 6]);
    assert_eq!(
        l.compat(2),
        vec![(1, matching(&[(1, 1)])), (3, matching(&[(1, 1)]))]
    );
    assert!(l.compat(5).is_empty());
    assert!(l.compat(6).is_empty());
}

#[test]
fn basis_nodes_pairwise_apart() {
    let t = small_tree();
    for (p, r) in [(0, 1), (0, 3), (1, 3)] {
        for m in t.maximal_matchings(p, r) {
            assert!(t.check_apart(&m, p, r).is_some(), "t{p} t{r} {m:?}");
        }
    }
}

#[test]
fn replay_of_unmatched_timer_removes_pair() {
    let mut teacher = Teacher::new(models::two_timer()).unwrap();
    let mut t = small_tree();
    let m = matching(&[(1, 1)]);
    let out = t.replay(&m, 3, 8, 2, &mut teacher).unwrap();
    assert!(matches!(out, ReplayOutcome::Apart(_)), "{out:?}");
    assert!(t.check_apart(&m, 3, 2).is_some());
}

#[test]
fn edge_conflicts_are_errors() {
    let mut t = small_tree();
    assert!(t
        .add_child(0, TreeAction::Input(0), "o", TreeUpdate::Bot)
        .is_err());
    assert!(t
        .add_child(99, TreeAction::Input(0), "o", TreeUpdate::Bot)
        .is_err());
}

/// A learned tree together with the target zone machine it observes.
fn learned(target: Mmt) -> (ObsTree, Teacher) {
    let mut teacher = Teacher::new(target).unwrap();
    let mut l = Learner::new(teacher.inputs(), LearnerConfig::default());
    l.run(&mut teacher).unwrap();
    (l.tree().clone(), teacher)
}

fn corpus() -> Vec<(ObsTree, Teacher)> {
    let mut out = vec![
        learned(models::two_timer()),
        learned(models::shared_timer()),
    ];
    for seed in 0..12 {
        let (t, teacher) = learned(random_mmt(&RandomSpec {
            states: 4,
            timers: 2,
            inputs: 2,
            outputs: 2,
            max_constant: 3,
            seed,
        }));
        if t.len() <= 150 {
            out.push((t, teacher));
        }
    }
    out
}

/// The state and timer maps of the functional simulation into the zone machine.
fn simulation(t: &ObsTree, teacher: &Teacher) -> (Vec<StateId>, BTreeMap<NodeId, TimerId>) {
    let m = &teacher.zone_mmt().mmt;
    let mut f = Vec::new();
    let mut g = BTreeMap::new();
    for q in 0..t.len() {
        let r = run_of_symbolic(m, &t.symbolic_word(q).unwrap()).unwrap();
        f.push(r.end());
        if let Some(step) = r.steps.last() {
            if let Update::Start(x, _) = step.update {
                g.insert(q, x);
            }
        }
    }
    (f, g)
}

fn sub_matchings(m: &Matching, mask: u32) -> Matching {
    m.iter()
        .enumerate()
        .filter(|(k, _)| mask & (1 << k) != 0)
        .map(|(_, (a, b))| (*a, *b))
        .collect()
}

#[test]
fn apartness_is_monotone_in_the_matching() {
    let mut checked = 0;
    for (t, _) in corpus() {
        for p in 0..t.len() {
            for r in 0..t.len() {
                if p == r || !t.is_explored(p) || !t.is_explored(r) {
                    continue;
                }
                for big in t.maximal_matchings(p, r) {
                    for mask in 0..(1u32 << big.len()) {
                        let small = sub_matchings(&big, mask);
                        let Some(w) = t.check_apart(&small, p, r) else {
                            continue;
                        };
                        assert!(
                            !t.classify(&big, p, r, w.end).is_empty(),
                            "t{p} t{r} {small:?} {big:?}"
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked >= 200, "only {checked} pairs");
}

#[test]
fn apartness_is_sound_for_the_simulation() {
    for (t, teacher) in corpus() {
        let (f, g) = simulation(&t, &teacher);
        for p in 0..t.len() {
            for r in 0..t.len() {
                for m in t.maximal_matchings(p, r) {
                    if t.check_apart(&m, p, r).is_none() {
                        continue;
                    }
                    let timers_differ = m.iter().any(|(x, y)| g.get(x) != g.get(y));
                    assert!(f[p] != f[r] || timers_differ, "t{p} t{r} {m:?}");
                }
            }
        }
    }
}

fn compose(mu: &Matching, m: &Matching) -> Option<Matching> {
    let inv: Matching = m.iter().map(|(a, b)| (*b, *a)).collect();
    inv.iter()
        .map(|(y, x)| mu.get(x).map(|z| (*y, *z)))
        .collect()
}

#[test]
fn weak_co_transitivity() {
    let mut scenarios = 0;
    for (t, _) in corpus() {
        let explored: Vec<NodeId> = (0..t.len()).filter(|q| t.is_explored(*q)).collect();
        for &p in &explored {
            for &p2 in &explored {
                if p == p2 {
                    continue;
                }
                for m in t.maximal_matchings(p, p2) {
                    let Some(w) = t.check_apart_behavioral(&m, p, p2) else {
                        continue;
                    };
                    let mut end = w.end;
                    if w.case == ApartCase::Constants {
                        let TreeUpdate::Start(x, _) = t.update(end) else {
                            continue;
                        };
                        match t.shortest_timeout(end, x) {
                            Some(e) => end = e,
                            None => continue,
                        }
                    }
                    for &r in &explored {
                        if r == p || r == p2 {
                            continue;
                        }
                        for mu in t.maximal_matchings(p, r) {
                            if !m.keys().all(|x| mu.contains_key(x)) {
                                continue;
                            }
                            let Some((copied, _)) = t.copy_run(&mu, p, end, r) else {
                                continue;
                            };
                            let last = copied.last().copied().unwrap_or(r);
                            if !t.is_explored(last) {
                                continue;
                            }
                            let nu = compose(&mu, &m).unwrap();
                            assert!(
                                t.check_apart(&mu, p, r).is_some()
                                    || t.check_apart(&nu, p2, r).is_some(),
                                "t{p} t{p2} t{r}"
                            );
                            scenarios += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(scenarios >= 50, "only {scenarios} scenarios");
}
