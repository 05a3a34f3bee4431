use std::collections::BTreeMap;

use proptest::prelude::*;

use mmt::constraints::is_feasible;
use mmt::dbm::Bound;
use mmt::equiv::symbolic_equiv;
use mmt::gmmt::gmmt_to_mmt;
use mmt::mmt::{Action, Mmt, Run, Step, TimerId};
use mmt::models;
use mmt::random::{random_raw_mmt, RandomSpec};
use mmt::zones::{build_zone_mmt, enabled, is_complete, Zone};
use mmt::Time;

type Raw = (usize, usize, bool, i64);

fn t(n: i64, d: i64) -> Time {
    Time::new(n, d)
}

fn timers(n: usize) -> Vec<TimerId> {
    (0..n as u32).map(TimerId).collect()
}

fn build(n: usize, raw: &[Raw]) -> Zone {
    let xs = timers(n);
    let slot = |k: usize| if k == 0 { None } else { Some(xs[k - 1]) };
    let mut z = Zone::universe(&xs);
    for &(i, j, strict, c) in raw {
        let b = if strict { Bound::lt(c) } else { Bound::le(c) };
        z.constrain(slot(i % (n + 1)), slot(j % (n + 1)), b);
    }
    z
}

/// Direct evaluation of the generating constraints.
fn satisfies(n: usize, raw: &[Raw], v: &BTreeMap<TimerId, Time>) -> bool {
    let val = |k: usize| {
        if k == 0 {
            t(0, 1)
        } else {
            v[&TimerId(k as u32 - 1)]
        }
    };
    v.values().all(|x| *x >= t(0, 1))
        && raw.iter().all(|&(i, j, strict, c)| {
            let diff = val(i % (n + 1)) - val(j % (n + 1));
            if strict {
                diff < t(c, 1)
            } else {
                diff <= t(c, 1)
            }
        })
}

fn grid(n: usize, den: i64, max: i64) -> Vec<Vec<Time>> {
    let axis: Vec<Time> = (0..=max * den).map(|k| t(k, den)).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(*a);
                    q
                })
            })
            .collect();
    }
    out
}

fn valuation(xs: &[TimerId], vals: &[Time]) -> BTreeMap<TimerId, Time> {
    xs.iter().copied().zip(vals.iter().copied()).collect()
}

fn raw_constraints() -> impl Strategy<Value = (usize, Vec<Raw>)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0usize..4, 0usize..4, any::<bool>(), -3i64..=4), 0..5),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn membership_matches_constraints((n, raw) in raw_constraints()) {
        let z = build(n, &raw);
        let xs = timers(n);
        for p in grid(n, 4, 4) {
            let v = valuation(&xs, &p);
            prop_assert_eq!(z.contains(&v), satisfies(n, &raw, &v), "{:?}", p);
        }
    }

    #[test]
    fn down_matches_grid_oracle((n, raw) in raw_constraints()) {
        let z = build(n, &raw);
        let d = z.down();
        let xs = timers(n);
        for p in grid(n, 4, 4) {
            let v = valuation(&xs, &p);
            let oracle = (0..=48).any(|k| {
                let shifted: BTreeMap<TimerId, Time> =
                    v.iter().map(|(x, a)| (*x, *a + t(k, 8))).collect();
                satisfies(n, &raw, &shifted)
            });
            prop_assert_eq!(d.contains(&v), oracle, "{:?}", p);
        }
    }

    #[test]
    fn restrict_matches_grid_oracle((n, raw) in raw_constraints(), keep_mask in 0u32..8) {
        let z = build(n, &raw);
        let xs = timers(n);
        let keep: Vec<TimerId> = xs.iter().copied().filter(|x| keep_mask & (1 << x.0) != 0).collect();
        let dropped: Vec<TimerId> = xs.iter().copied().filter(|x| !keep.contains(x)).collect();
        let r = z.restrict(&keep);
        prop_assert_eq!(r.timers(), &keep[..]);
        let ext = grid(dropped.len(), 8, 5);
        for p in grid(keep.len(), 4, 4) {
            let v = valuation(&keep, &p);
            let oracle = ext.iter().any(|e| {
                let mut full = v.clone();
                full.extend(valuation(&dropped, e));
                satisfies(n, &raw, &full)
            });
            prop_assert_eq!(r.contains(&v), oracle, "{:?}", p);
        }
    }

    #[test]
    fn assign_and_timeout_match_grid_oracle((n, raw) in raw_constraints(), which in 0usize..3, c in 1i64..=3) {
        let z = build(n, &raw);
        let xs = timers(n);
        let x = xs[which % n];
        let a = z.assign(x, c);
        let to = z.timeout(x);
        for p in grid(n, 4, 4) {
            let v = valuation(&xs, &p);
            let oracle = v[&x] == t(c, 1) && (0..=40).any(|k| {
                let mut old = v.clone();
                old.insert(x, t(k, 8));
                satisfies(n, &raw, &old)
            });
            prop_assert_eq!(a.contains(&v), oracle, "assign {:?}", p);
            let oracle = v[&x] == t(0, 1) && satisfies(n, &raw, &v);
            prop_assert_eq!(to.contains(&v), oracle, "timeout {:?}", p);
        }
    }
}

#[test]
fn assign_adds_a_fresh_timer() {
    let z = Zone::unit().assign(TimerId(1), 2);
    assert_eq!(z.timers(), &[TimerId(1)]);
    assert!(z.contains(&BTreeMap::from([(TimerId(1), t(2, 1))])));
    assert!(!z.contains(&BTreeMap::from([(TimerId(1), t(1, 1))])));
}

/// Every run of `m` from the initial state with at most `depth` steps.
fn runs(m: &Mmt, depth: usize) -> Vec<Run> {
    let mut out = vec![Run {
        start: m.initial(),
        steps: Vec::new(),
    }];
    let mut frontier = out.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for r in &frontier {
            for (a, tr) in m.transitions(r.end()) {
                let mut r2 = r.clone();
                r2.steps.push(Step {
                    action: a,
                    output: tr.output,
                    update: tr.update,
                    target: tr.target,
                });
                next.push(r2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn zone_suite() -> Vec<(String, Mmt)> {
    let mut out = vec![
        ("two-timer".to_string(), models::two_timer()),
        (
            "fddi".to_string(),
            gmmt_to_mmt(&models::fddi(20, 100)).unwrap(),
        ),
    ];
    for seed in 0..25 {
        let spec = RandomSpec {
            states: 2 + (seed as usize % 5),
            timers: 1 + (seed as usize % 2),
            inputs: 2,
            outputs: 2,
            max_constant: 3,
            seed,
        };
        out.push((format!("random-{seed}"), random_raw_mmt(&spec)));
    }
    out
}

#[test]
fn zone_machine_is_equivalent_and_every_run_feasible() {
    for (name, m) in zone_suite() {
        let z = build_zone_mmt(&m);
        assert!(z.mmt.validate().violations.is_empty(), "{name}");
        assert!(is_complete(&z.mmt), "{name}");
        assert!(
            symbolic_equiv(&z.mmt, &m).unwrap().is_equivalent(),
            "{name}"
        );
        for r in runs(&z.mmt, 6) {
            assert!(is_feasible(&z.mmt, &r), "{name}: {:?}", r.actions());
        }
    }
}

#[test]
fn two_timer_zone_machine_shape() {
    let m = models::two_timer();
    assert_eq!(m.num_states(), 6);
    let z = build_zone_mmt(&m);
    let q2 = m.state_id("q2").unwrap();
    let x = m.timer_id("x").unwrap();
    assert_eq!(enabled(&m, q2).into_iter().collect::<Vec<_>>(), vec![x]);
    for q in z.mmt.states() {
        let base = z.base[q.index()];
        assert_eq!(z.mmt.active(q), m.active(base));
    }
    assert!(z
        .mmt
        .transition(z.mmt.initial(), Action::Input(m.input_id("i").unwrap()))
        .is_some());
}
