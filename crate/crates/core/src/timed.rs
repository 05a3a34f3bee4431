//! Timed semantics: configurations, timed words and timed runs.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ModelError;
use crate::mmt::{Action, InputId, Mmt, OutputId, StateId, TimerId, Update};
use crate::scalar::{format_rational, parse_rational, Scalar};
use crate::zones;
use crate::Time;

/// A state together with the values of its active timers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration<T> {
    pub state: StateId,
    pub values: BTreeMap<TimerId, T>,
}

impl<T: Scalar> Configuration<T> {
    pub fn initial(m: &Mmt) -> Self {
        Configuration {
            state: m.initial(),
            values: BTreeMap::new(),
        }
    }

    /// The configuration after letting `d` time units elapse, if no timer
    /// would become negative.
    pub fn delay(&self, d: &T) -> Option<Self> {
        if d.is_negative() {
            return None;
        }
        let mut values = BTreeMap::new();
        for (&x, v) in &self.values {
            let nv = v.clone() - d.clone();
            if nv.is_negative() {
                return None;
            }
            values.insert(x, nv);
        }
        Some(Configuration {
            state: self.state,
            values,
        })
    }

    /// The smallest timer value, if any timer is active.
    pub fn min_value(&self) -> Option<&T> {
        self.values.values().min()
    }
}

/// A delay or a discrete action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event<T> {
    Delay(T),
    Action(Action),
}

/// One step of the timed semantics; `None` when the event is not allowed.
pub fn timed_step<T: Scalar>(
    m: &Mmt,
    c: &Configuration<T>,
    e: &Event<T>,
) -> Option<(Configuration<T>, Option<OutputId>)> {
    match e {
        Event::Delay(d) => c.delay(d).map(|c| (c, None)),
        Event::Action(a) => {
            if let Action::Timeout(x) = a {
                if !c.values.get(x).is_some_and(|v| v.is_zero()) {
                    return None;
                }
            }
            let t = m.transition(c.state, *a)?;
            let mut values = BTreeMap::new();
            for &y in m.active(t.target) {
                let v = match t.update {
                    Update::Start(z, k) if z == y => T::from_int(k as i64),
                    _ => c.values.get(&y)?.clone(),
                };
                values.insert(y, v);
            }
            Some((
                Configuration {
                    state: t.target,
                    values,
                },
                Some(t.output),
            ))
        }
    }
}

/// Alternating delays and symbols `d_0 a_1 d_1 ... a_n d_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedWord<T, A> {
    pub delays: Vec<T>,
    pub symbols: Vec<A>,
}

impl<T: Scalar, A> TimedWord<T, A> {
    pub fn new(delays: Vec<T>, symbols: Vec<A>) -> Result<Self, ModelError> {
        if delays.len() != symbols.len() + 1 {
            return Err(ModelError::Parse(
                "a timed word needs one more delay than symbols".into(),
            ));
        }
        if delays.iter().any(|d| d.is_negative()) {
            return Err(ModelError::Parse("delays must be non-negative".into()));
        }
        Ok(TimedWord { delays, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl TimedWord<Time, String> {
    /// Parses `0.5 i 1 to[x] 3`. A missing leading or trailing delay is zero.
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let mut delays = Vec::new();
        let mut symbols = Vec::new();
        let mut pending: Option<Time> = None;
        for tok in s.split_whitespace() {
            if let Some(d) = parse_rational(tok) {
                if pending.is_some() {
                    return Err(ModelError::Parse(format!("two delays in a row at `{tok}`")));
                }
                pending = Some(d);
            } else {
                delays.push(pending.take().unwrap_or_default());
                symbols.push(tok.to_string());
            }
        }
        delays.push(pending.unwrap_or_default());
        TimedWord::new(delays, symbols)
    }

    pub fn resolve(&self, m: &Mmt) -> Result<TimedWord<Time, Action>, ModelError> {
        let symbols = self
            .symbols
            .iter()
            .map(|s| m.parse_action(s))
            .collect::<Result<Vec<_>, _>>()?;
        TimedWord::new(self.delays.clone(), symbols)
    }

    pub fn resolve_inputs(&self, m: &Mmt) -> Result<TimedWord<Time, InputId>, ModelError> {
        let symbols = self
            .symbols
            .iter()
            .map(|s| {
                m.input_id(s)
                    .ok_or_else(|| ModelError::UnknownInput(s.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        TimedWord::new(self.delays.clone(), symbols)
    }
}

/// One discrete step of a timed run, preceded by a delay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedStep<T> {
    pub delay: T,
    pub action: Action,
    pub output: OutputId,
    pub update: Update,
    pub after: Configuration<T>,
}

/// A timed run: a start configuration, delayed steps and a final delay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedRun<T> {
    pub start: Configuration<T>,
    pub steps: Vec<TimedStep<T>>,
    pub final_delay: T,
}

impl<T: Scalar> TimedRun<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The configuration after the final delay.
    pub fn end(&self) -> Configuration<T> {
        let last = self.steps.last().map_or(&self.start, |s| &s.after);
        last.delay(&self.final_delay).expect("valid timed run")
    }

    /// The configuration reached just before step `k` fires.
    pub fn before(&self, k: usize) -> Configuration<T> {
        let prev = if k == 0 {
            &self.start
        } else {
            &self.steps[k - 1].after
        };
        prev.delay(&self.steps[k].delay).expect("valid timed run")
    }

    pub fn actions(&self) -> Vec<Action> {
        self.steps.iter().map(|s| s.action).collect()
    }

    /// The absolute time of every step.
    pub fn times(&self) -> Vec<T> {
        let mut t = T::zero();
        self.steps
            .iter()
            .map(|s| {
                t = t.clone() + s.delay.clone();
                t.clone()
            })
            .collect()
    }

    /// The timed word of actions read by the run.
    pub fn word(&self) -> TimedWord<T, Action> {
        let mut delays: Vec<T> = self.steps.iter().map(|s| s.delay.clone()).collect();
        delays.push(self.final_delay.clone());
        TimedWord {
            delays,
            symbols: self.actions(),
        }
    }

    /// Whether no timer other than the one timing out reaches zero at a step,
    /// and no timer is zero at the end.
    pub fn is_race_free(&self) -> bool {
        for k in 0..self.steps.len() {
            let c = self.before(k);
            let timed_out = match self.steps[k].action {
                Action::Timeout(x) => Some(x),
                Action::Input(_) => None,
            };
            if c.values
                .iter()
                .any(|(&x, v)| v.is_zero() && Some(x) != timed_out)
            {
                return false;
            }
        }
        !self.end().values.values().any(|v| v.is_zero())
    }

    /// Renders the run as alternating delays and `action/output` events.
    pub fn display<'a>(&'a self, m: &'a Mmt) -> TimedRunDisplay<'a, T> {
        TimedRunDisplay { run: self, m }
    }
}

impl TimedRun<Time> {
    /// Whether every delay is positive and the inputs occur at pairwise
    /// distinct fractional times.
    pub fn has_distinct_input_fractions(&self) -> bool {
        let mut seen: Vec<Time> = Vec::new();
        for (s, t) in self.steps.iter().zip(self.times()) {
            if let Action::Input(_) = s.action {
                let frac = t.fract();
                if seen.contains(&frac) {
                    return false;
                }
                seen.push(frac);
            }
        }
        true
    }

    /// Transparent: positive delays, race-free and distinct input fractions.
    pub fn is_transparent(&self) -> bool {
        self.steps.iter().all(|s| s.delay > Time::from_integer(0))
            && self.final_delay > Time::from_integer(0)
            && self.is_race_free()
            && self.has_distinct_input_fractions()
    }
}

pub struct TimedRunDisplay<'a, T> {
    run: &'a TimedRun<T>,
    m: &'a Mmt,
}

fn show<T: Scalar>(v: &T) -> String {
    let s = v.to_string();
    match s.split_once('/') {
        Some((n, d)) => match (n.parse::<i64>(), d.parse::<i64>()) {
            (Ok(n), Ok(d)) => format_rational(&Time::new(n, d)),
            _ => s,
        },
        None => s,
    }
}

impl<T: Scalar> fmt::Display for TimedRunDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.run.steps {
            write!(
                f,
                "{} {}/{} ",
                show(&s.delay),
                self.m.action_name(s.action),
                self.m.output_name(s.output)
            )?;
        }
        write!(f, "{}", show(&self.run.final_delay))
    }
}

/// The timed run reading a timed word of actions from the initial configuration.
pub fn run_timed_word<T: Scalar>(m: &Mmt, w: &TimedWord<T, Action>) -> Option<TimedRun<T>> {
    let start = Configuration::initial(m);
    let mut cur = start.clone();
    let mut steps = Vec::with_capacity(w.len());
    for (d, a) in w.delays.iter().zip(&w.symbols) {
        let before = cur.delay(d)?;
        let (after, out) = timed_step(m, &before, &Event::Action(*a))?;
        let t = m.transition(before.state, *a)?;
        steps.push(TimedStep {
            delay: d.clone(),
            action: *a,
            output: out?,
            update: t.update,
            after: after.clone(),
        });
        cur = after;
    }
    let final_delay = w.delays.last().cloned().unwrap_or_else(T::zero);
    cur.delay(&final_delay)?;
    Some(TimedRun {
        start,
        steps,
        final_delay,
    })
}

const MAX_INSTANT_TIMEOUTS: usize = 10_000;

/// The timed run on a timed word of inputs, firing timeouts as they expire.
///
/// A timeout fires before an input when its value does not exceed the
/// remaining delay. Simultaneous timeouts fire in the order they were started.
pub fn run_timed_input<T: Scalar>(
    m: &Mmt,
    w: &TimedWord<T, InputId>,
) -> Result<TimedRun<T>, ModelError> {
    if let Some((q, a)) = zones::first_missing(m) {
        return Err(ModelError::Incomplete {
            state: m.state_name(q).to_string(),
            action: m.action_name(a),
        });
    }
    let start: Configuration<T> = Configuration::initial(m);
    let mut cur = start.clone();
    let mut steps = Vec::new();
    let mut pending = T::zero();
    let n = w.symbols.len();
    let mut instant_steps = 0usize;
    let mut order: BTreeMap<TimerId, usize> = BTreeMap::new();
    for k in 0..=n {
        let mut remaining = w.delays[k].clone();
        loop {
            let due = cur
                .values
                .iter()
                .filter(|(_, v)| **v <= remaining)
                .min_by(|a, b| {
                    a.1.cmp(b.1)
                        .then(order.get(a.0).cmp(&order.get(b.0)))
                        .then(a.0.cmp(b.0))
                })
                .map(|(&x, v)| (x, v.clone()));
            let Some((x, v)) = due else { break };
            if v.is_zero() && pending.is_zero() {
                instant_steps += 1;
                if instant_steps > MAX_INSTANT_TIMEOUTS {
                    return Err(ModelError::Invalid(
                        "unbounded number of timeouts at a single instant".into(),
                    ));
                }
            } else {
                instant_steps = 0;
            }
            let before = cur.delay(&v).expect("delay below minimum");
            remaining = remaining - v.clone();
            let a = Action::Timeout(x);
            let t = *m
                .transition(before.state, a)
                .ok_or_else(|| ModelError::Incomplete {
                    state: m.state_name(before.state).to_string(),
                    action: m.action_name(a),
                })?;
            let (after, _) = timed_step(m, &before, &Event::Action(a))
                .ok_or_else(|| ModelError::Invalid("timer value missing".into()))?;
            steps.push(TimedStep {
                delay: pending.clone() + v,
                action: a,
                output: t.output,
                update: t.update,
                after: after.clone(),
            });
            if let Update::Start(y, _) = t.update {
                order.insert(y, steps.len());
            }
            pending = T::zero();
            cur = after;
        }
        cur = cur.delay(&remaining).expect("no timer expires");
        pending = pending + remaining;
        if k == n {
            break;
        }
        let a = Action::Input(w.symbols[k]);
        let before = cur.clone();
        let t = *m
            .transition(before.state, a)
            .ok_or_else(|| ModelError::Incomplete {
                state: m.state_name(before.state).to_string(),
                action: m.action_name(a),
            })?;
        let (after, _) = timed_step(m, &before, &Event::Action(a))
            .ok_or_else(|| ModelError::Invalid("timer value missing".into()))?;
        steps.push(TimedStep {
            delay: pending.clone(),
            action: a,
            output: t.output,
            update: t.update,
            after: after.clone(),
        });
        if let Update::Start(y, _) = t.update {
            order.insert(y, steps.len());
        }
        pending = T::zero();
        cur = after;
    }
    Ok(TimedRun {
        start,
        steps,
        final_delay: pending,
    })
}
