//! Delay constraints of an untimed run, feasibility and synthesis of
//! transparent timed runs.

use std::fmt;

use num_traits::Zero;

use crate::dbm::{Bound, Dbm};
use crate::mmt::{Action, Mmt, Run, Update};
use crate::scalar::Scalar;
use crate::timed::{run_timed_word, TimedRun, TimedWord};
use crate::Time;

/// `s_lhs - s_rhs ⋈ c` over the step times `s_0 = 0, s_1, ..., s_{n+1}`, where
/// `s_{n+1}` is the end of the run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffConstraint {
    pub lhs: usize,
    pub rhs: usize,
    pub bound: Bound<i64>,
}

impl fmt::Display for DiffConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{} - s{} {}", self.lhs, self.rhs, self.bound)
    }
}

/// The difference constraints that a run imposes on its step times, together
/// with the positions of inputs whose fractional parts must be distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayConstraintSystem {
    pub vars: usize,
    pub constraints: Vec<DiffConstraint>,
    pub fractional: Vec<usize>,
}

impl DelayConstraintSystem {
    fn push(&mut self, lhs: usize, rhs: usize, bound: Bound<i64>) {
        self.constraints.push(DiffConstraint { lhs, rhs, bound });
    }

    fn push_eq(&mut self, lhs: usize, rhs: usize, c: i64) {
        self.push(lhs, rhs, Bound::le(c));
        self.push(rhs, lhs, Bound::le(-c));
    }

    /// Whether the system contains `s_lhs - s_rhs = c`.
    pub fn has_equality(&self, lhs: usize, rhs: usize, c: i64) -> bool {
        self.has(lhs, rhs, &Bound::le(c)) && self.has(rhs, lhs, &Bound::le(-c))
    }

    pub fn has(&self, lhs: usize, rhs: usize, bound: &Bound<i64>) -> bool {
        self.constraints
            .iter()
            .any(|k| k.lhs == lhs && k.rhs == rhs && &k.bound == bound)
    }

    /// The same system with every strict bound made non-strict.
    pub fn relaxed(&self) -> Self {
        DelayConstraintSystem {
            vars: self.vars,
            constraints: self
                .constraints
                .iter()
                .map(|k| DiffConstraint {
                    lhs: k.lhs,
                    rhs: k.rhs,
                    bound: k.bound.relaxed(),
                })
                .collect(),
            fractional: self.fractional.clone(),
        }
    }

    pub fn dbm<T: Scalar>(&self) -> Dbm<T> {
        let mut d = Dbm::unconstrained(self.vars);
        for k in &self.constraints {
            let b = match &k.bound {
                Bound::Le(c) => Bound::Le(T::from_int(*c)),
                Bound::Lt(c) => Bound::Lt(T::from_int(*c)),
                Bound::Inf => Bound::Inf,
            };
            d.constrain(k.lhs, k.rhs, b);
        }
        d.close();
        d
    }

    /// Whether the difference constraints have a solution.
    pub fn is_satisfiable(&self) -> bool {
        !self.dbm::<i64>().is_empty()
    }
}

impl fmt::Display for DelayConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.constraints.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The constraints under which a run has a race-free timed realisation with
/// positive delays.
pub fn constraints_of(m: &Mmt, r: &Run) -> DelayConstraintSystem {
    let n = r.len();
    let mut sys = DelayConstraintSystem {
        vars: n + 2,
        constraints: Vec::new(),
        fractional: Vec::new(),
    };
    for k in 1..=n + 1 {
        sys.push(k - 1, k, Bound::lt(0));
    }
    for (k, step) in r.steps.iter().enumerate() {
        if let Action::Input(_) = step.action {
            sys.fractional.push(k + 1);
        }
    }
    for (j, step) in r.steps.iter().enumerate() {
        let Update::Start(x, c) = step.update else {
            continue;
        };
        let start = j + 1;
        if !m.is_active(step.target, x) {
            continue;
        }
        let c = c as i64;
        let mut closed = false;
        for (k, later) in r.steps.iter().enumerate().skip(j + 1) {
            let pos = k + 1;
            if later.action == Action::Timeout(x) {
                sys.push_eq(pos, start, c);
                closed = true;
                break;
            }
            let restarted = matches!(later.update, Update::Start(y, _) if y == x);
            if restarted || !m.is_active(later.target, x) {
                sys.push(pos, start, Bound::lt(c));
                closed = true;
                break;
            }
        }
        if !closed {
            sys.push(n + 1, start, Bound::lt(c));
        }
    }
    sys
}

/// Whether some timed run, possibly with zero delays and races, follows `r`.
pub fn is_feasible(m: &Mmt, r: &Run) -> bool {
    constraints_of(m, r).relaxed().is_satisfiable()
}

/// Whether some race-free timed run with positive delays follows `r`.
pub fn is_race_free_feasible(m: &Mmt, r: &Run) -> bool {
    constraints_of(m, r).is_satisfiable()
}

fn frac(v: &Time) -> Time {
    v.fract()
}

/// Picks the earliest admissible value of an open or half-open interval.
fn pick(lo: &Bound<Time>, hi: &Bound<Time>, steps: i64, avoid: &[Time]) -> Option<Time> {
    let lo_v = -*lo.value()?;
    if !lo.is_strict() && hi.admits(&lo_v) && !avoid.contains(&frac(&lo_v)) {
        return Some(lo_v);
    }
    let width = match hi.value() {
        Some(h) => {
            let w = *h - lo_v;
            if w > Time::from_integer(1) {
                Time::from_integer(1)
            } else {
                w
            }
        }
        None => Time::from_integer(1),
    };
    if width <= Time::zero() {
        return None;
    }
    for t in 1..=steps + 1 {
        let v = lo_v + width * Time::new(t, steps + 2);
        if hi.admits(&v) && !avoid.contains(&frac(&v)) {
            return Some(v);
        }
    }
    None
}

/// A transparent timed run following `r`: positive delays, no races and
/// pairwise distinct fractional parts of input times. Each time is chosen as
/// the earliest candidate consistent with the constraints.
pub fn synth_transparent(m: &Mmt, r: &Run) -> Option<TimedRun<Time>> {
    let sys = constraints_of(m, r);
    let mut d: Dbm<Time> = sys.dbm();
    if d.is_empty() {
        return None;
    }
    let n = r.len();
    let candidates = sys.fractional.len() as i64;
    let mut times = vec![Time::zero()];
    let mut used: Vec<Time> = Vec::new();
    for k in 1..=n + 1 {
        let lo = d.get(0, k).clone();
        let hi = d.get(k, 0).clone();
        let is_input = sys.fractional.contains(&k);
        let avoid: &[Time] = if is_input { &used } else { &[] };
        let v = pick(&lo, &hi, candidates, avoid)?;
        if is_input {
            used.push(frac(&v));
        }
        d.and(k, 0, Bound::Le(v));
        d.and(0, k, Bound::Le(-v));
        if d.is_empty() {
            return None;
        }
        times.push(v);
    }
    let delays: Vec<Time> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let word = TimedWord {
        delays,
        symbols: r.actions(),
    };
    let tr = run_timed_word(m, &word)?;
    let states_match = tr
        .steps
        .iter()
        .zip(&r.steps)
        .all(|(a, b)| a.after.state == b.target);
    if states_match && tr.is_transparent() {
        Some(tr)
    } else {
        None
    }
}
