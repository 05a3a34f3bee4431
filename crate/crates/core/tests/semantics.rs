use std::collections::BTreeSet;

use mmt::constraints::{constraints_of, is_feasible, is_race_free_feasible, synth_transparent};
use mmt::equiv::{symbolic_equiv, CexKind, EquivResult};
use mmt::mmt::{Action, Mmt, MmtBuilder, OutputId, Run, Step, Update};
use mmt::models;
use mmt::random::{random_raw_mmt, RandomSpec};
use mmt::symbolic::{output_word, run_of_symbolic, symbolic_of, SymbolicWord};
use mmt::teacher::{Teacher, WaitAnswer};
use mmt::timed::{run_timed_input, run_timed_word, Configuration, TimedWord};
use mmt::zones::build_zone_mmt;
use mmt::Time;

fn t(n: i64, d: i64) -> Time {
    Time::new(n, d)
}

fn run(m: &Mmt, word: &str) -> Run {
    let acts: Vec<Action> = word
        .split_whitespace()
        .map(|a| m.parse_action(a).unwrap())
        .collect();
    m.run(m.initial(), &acts).unwrap().unwrap()
}

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

#[test]
fn timed_word_with_timeouts() {
    let m = models::two_timer();
    let w = TimedWord::parse("0.5 i 1 i 1 to[x] 2 to[y] 0")
        .unwrap()
        .resolve(&m)
        .unwrap();
    let r = run_timed_word(&m, &w).unwrap();
    let (x, y) = (m.timer_id("x").unwrap(), m.timer_id("y").unwrap());
    let states: Vec<&str> = r
        .steps
        .iter()
        .map(|s| m.state_name(s.after.state))
        .collect();
    assert_eq!(states, ["q1", "q2", "q3", "q0"]);
    assert_eq!(r.before(2).values[&x], t(0, 1));
    assert_eq!(r.before(2).values[&y], t(2, 1));
    assert_eq!(r.steps[2].after.values[&x], t(2, 1));
    assert!(r.end().values.is_empty());
    assert!(!r.is_race_free());
}

#[test]
fn timeout_before_expiry_is_rejected() {
    let m = models::two_timer();
    let w = TimedWord::parse("0.5 i 1 to[x] 0")
        .unwrap()
        .resolve(&m)
        .unwrap();
    assert!(run_timed_word(&m, &w).is_none());
}

#[test]
fn delays_past_a_timeout_are_rejected() {
    let m = models::two_timer();
    let c = Configuration::<Time>::initial(&m);
    let w = TimedWord::parse("0 i 3").unwrap().resolve(&m).unwrap();
    assert!(run_timed_word(&m, &w).is_none());
    assert!(c.delay(&t(7, 1)).is_some());
}

#[test]
fn input_word_fires_timeouts() {
    let m = models::two_timer();
    let w = TimedWord::parse("0.5 i 1 i 3.5")
        .unwrap()
        .resolve_inputs(&m)
        .unwrap();
    let r = run_timed_input(&m, &w).unwrap();
    assert_eq!(
        r.display(&m).to_string(),
        "0.5 i/o 1 i/o' 1 to[x]/o 2 to[y]/o 0.5"
    );
}

#[test]
fn input_word_without_inputs() {
    let m = models::two_timer();
    let w = TimedWord::parse("2").unwrap().resolve_inputs(&m).unwrap();
    assert_eq!(
        run_timed_input(&m, &w).unwrap().display(&m).to_string(),
        "2"
    );
}

#[test]
fn exact_rationals_in_traces() {
    let m = models::two_timer();
    let w = TimedWord::parse("1/3 i 7/3")
        .unwrap()
        .resolve_inputs(&m)
        .unwrap();
    let r = run_timed_input(&m, &w).unwrap();
    assert_eq!(r.display(&m).to_string(), "1/3 i/o 2 to[x]/o 1/3");
}

#[test]
fn feasibility_of_spanning_runs() {
    let m = models::two_timer();
    assert!(is_feasible(&m, &run(&m, "i i to[x]")));
    assert!(is_race_free_feasible(&m, &run(&m, "i i to[x]")));

    let prefix = run(&m, "i i");
    let mut bad = prefix.clone();
    bad.steps.push(Step {
        action: m.parse_action("to[y]").unwrap(),
        output: OutputId(0),
        update: Update::Bot,
        target: m.initial(),
    });
    assert!(!is_feasible(&m, &bad));
}

/// Two timers of equal length; `y` can only time out first when both were
/// started at the same instant.
fn same_instant() -> Mmt {
    MmtBuilder::new()
        .timers(["x", "y"])
        .input("i")
        .state("q0", &[])
        .state("q1", &["x"])
        .state("q2", &["x", "y"])
        .state("q3", &["x"])
        .state("q4", &["y"])
        .edge("q0", "i", "q1", "o", Some(("x", 1)))
        .edge("q1", "i", "q2", "o", Some(("y", 1)))
        .edge("q1", "to[x]", "q0", "o", None)
        .edge("q2", "i", "q2", "o", None)
        .edge("q2", "to[x]", "q4", "o", None)
        .edge("q2", "to[y]", "q3", "o", None)
        .edge("q3", "i", "q3", "o", None)
        .edge("q3", "to[x]", "q0", "o", None)
        .edge("q4", "i", "q4", "o", None)
        .edge("q4", "to[y]", "q0", "o", None)
        .build()
        .unwrap()
}

#[test]
fn race_needs_relaxed_feasibility() {
    let m = same_instant();
    let r = run(&m, "i i to[y] to[x]");
    assert!(is_feasible(&m, &r));
    assert!(!is_race_free_feasible(&m, &r));
    assert!(synth_transparent(&m, &r).is_none());
    let ok = run(&m, "i i to[x] to[y]");
    assert!(synth_transparent(&m, &ok).unwrap().is_transparent());
}

#[test]
fn two_timer_runs_avoid_races() {
    let m = models::two_timer();
    for r in runs(&m, 6) {
        assert_eq!(is_feasible(&m, &r), is_race_free_feasible(&m, &r));
    }
}

#[test]
fn constraint_system_of_a_run() {
    let m = models::two_timer();
    let sys = constraints_of(&m, &run(&m, "i i to[x]"));
    assert_eq!(sys.vars, 5);
    assert!(sys.has_equality(3, 1, 2));
    assert_eq!(sys.fractional, vec![1, 2]);
}

/// Searches timed runs over delays that are multiples of a half.
fn grid_feasible(m: &Mmt, r: &Run) -> bool {
    fn go(m: &Mmt, r: &Run, k: usize, c: &Configuration<Time>) -> bool {
        if k == r.steps.len() {
            return true;
        }
        let step = &r.steps[k];
        let delays: Vec<Time> = match step.action {
            Action::Timeout(x) => match c.values.get(&x) {
                Some(v) => vec![*v],
                None => return false,
            },
            Action::Input(_) => (0..=8).map(|h| Time::new(h, 2)).collect(),
        };
        for d in delays {
            let Some(before) = c.delay(&d) else { continue };
            let w = mmt::timed::Event::Action(step.action);
            let Some((after, _)) = mmt::timed::timed_step(m, &before, &w) else {
                continue;
            };
            if after.state == step.target && go(m, r, k + 1, &after) {
                return true;
            }
        }
        false
    }
    go(m, r, 0, &Configuration::initial(m))
}

#[test]
fn feasibility_agrees_with_grid_search() {
    let m = models::two_timer();
    let all = runs(&m, 5);
    assert!(all.len() > 30);
    for r in &all {
        assert_eq!(
            is_feasible(&m, r),
            grid_feasible(&m, r),
            "{:?}",
            r.actions()
        );
    }
    let mut infeasible = 0;
    for seed in 0..40 {
        let m = random_raw_mmt(&RandomSpec {
            states: 5,
            timers: 2,
            inputs: 1,
            seed,
            ..RandomSpec::default()
        });
        for r in runs(&m, 5) {
            let f = is_feasible(&m, &r);
            assert_eq!(f, grid_feasible(&m, &r), "seed {seed}: {:?}", r.actions());
            infeasible += usize::from(!f);
        }
    }
    assert!(infeasible > 0);
}

#[test]
fn transparent_runs_for_every_feasible_zone_run() {
    let z = build_zone_mmt(&models::two_timer()).mmt;
    let mut count = 0;
    for r in runs(&z, 5) {
        assert!(is_feasible(&z, &r));
        let tr = synth_transparent(&z, &r).unwrap_or_else(|| panic!("{:?}", r.actions()));
        assert!(tr.is_transparent());
        assert!(tr.steps.iter().all(|s| s.delay > t(0, 1)));
        assert_eq!(tr.actions(), r.actions());
        let states: Vec<_> = tr.steps.iter().map(|s| s.after.state).collect();
        let expected: Vec<_> = r.steps.iter().map(|s| s.target).collect();
        assert_eq!(states, expected);
        count += 1;
    }
    assert!(count > 20);
}

#[test]
fn symbolic_words_of_runs() {
    let m = models::two_timer();
    let r = run(&m, "i i to[x] to[y]");
    assert_eq!(
        symbolic_of(&m, &r).unwrap().to_string(),
        "i i to[2,1] to[3,2]"
    );
    let w: SymbolicWord = "i i to[2,1] to[3,2]".parse().unwrap();
    assert_eq!(run_of_symbolic(&m, &w).unwrap().actions(), r.actions());
    assert!(run_of_symbolic(&m, &"i to[3,1]".parse().unwrap()).is_none());
}

#[test]
fn output_and_wait_queries() {
    let mut teacher = Teacher::new(models::two_timer()).unwrap();
    let w: SymbolicWord = "i i i".parse().unwrap();
    assert_eq!(teacher.oq(&w).unwrap(), ["o", "o'", "o'"]);
    let expected: BTreeSet<WaitAnswer> = [(2, 3), (3, 2)]
        .into_iter()
        .map(|(constant, index)| WaitAnswer {
            constant,
            index,
            output: "o".into(),
        })
        .collect();
    assert_eq!(teacher.wq(&w).unwrap(), expected);
    assert_eq!(teacher.wq(&SymbolicWord::new()).unwrap(), BTreeSet::new());
    let s = teacher.stats();
    assert_eq!((s.oq, s.wq, s.eq), (1, 2, 0));
}

#[test]
fn counterexample_against_one_timer_hypothesis() {
    let m = models::two_timer();
    let h = models::one_timer_hypothesis();
    let EquivResult::Counterexample(cex) = symbolic_equiv(&h, &m).unwrap() else {
        panic!("expected a counterexample");
    };
    assert_eq!(cex.word.to_string(), "i i i to[2,1]");
    assert_eq!(cex.kind, CexKind::MissingInSecond);
    assert_eq!(output_word(&h, &cex.word), cex.first_outputs);
    assert!(cex.second_outputs.is_none());
}

#[test]
fn equivalence_of_minimal_machine() {
    let m = models::two_timer();
    assert!(symbolic_equiv(&m, &m).unwrap().is_equivalent());
    assert!(symbolic_equiv(&models::two_timer_minimal(), &m)
        .unwrap()
        .is_equivalent());
}

#[test]
fn output_mismatch_is_reported() {
    let a = models::echo();
    let mut text = mmt::io::mmt_to_json(&a);
    text = text.replacen("\"output\": \"", "\"output\": \"z", 1);
    let b = mmt::io::parse_mmt(&text).unwrap();
    let EquivResult::Counterexample(cex) = symbolic_equiv(&a, &b).unwrap() else {
        panic!("expected a counterexample");
    };
    assert_eq!(cex.kind, CexKind::OutputMismatch);
    assert_eq!(cex.word.len(), 1);
}

fn trace_with<T: mmt::Scalar>(m: &Mmt, delays: &[i64], inputs: &[&str]) -> String {
    let delays = delays.iter().map(|d| T::from_int(*d)).collect();
    let symbols = inputs.iter().map(|i| m.input_id(i).unwrap()).collect();
    let w = TimedWord::new(delays, symbols).unwrap();
    run_timed_input(m, &w).unwrap().display(m).to_string()
}

#[test]
fn integer_delays_agree_across_scalars() {
    let m = models::two_timer();
    let (delays, inputs) = ([1, 1, 4, 0], ["i", "i", "i"]);
    let exact = trace_with::<Time>(&m, &delays, &inputs);
    assert_eq!(exact, trace_with::<i64>(&m, &delays, &inputs));
    assert_eq!(exact, trace_with::<i128>(&m, &delays, &inputs));
    assert_eq!(
        exact,
        trace_with::<num_rational::Ratio<i128>>(&m, &delays, &inputs)
    );
}
