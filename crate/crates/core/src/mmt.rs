//! Mealy machines with timers: data model, builder, validation and untimed runs.

use std::collections::HashMap;
use std::fmt;

use crate::error::ModelError;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Index of a state.
    StateId
);
id_type!(
    /// Index of a timer.
    TimerId
);
id_type!(
    /// Index of an input symbol.
    InputId
);
id_type!(
    /// Index of an output symbol.
    OutputId
);

/// An input symbol or the timeout of a timer. Inputs order before timeouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Input(InputId),
    Timeout(TimerId),
}

/// The timer update attached to a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Update {
    Bot,
    Start(TimerId, u32),
}

impl Update {
    pub fn started(self) -> Option<(TimerId, u32)> {
        match self {
            Update::Bot => None,
            Update::Start(x, c) => Some((x, c)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub target: StateId,
    pub output: OutputId,
    pub update: Update,
}

/// Interned names with reverse lookup.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Names {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Names {
    pub(crate) fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub(crate) fn insert(&mut self, name: &str) -> Option<u32> {
        if self.index.contains_key(name) {
            return None;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Some(id)
    }

    pub(crate) fn intern(&mut self, name: &str) -> u32 {
        match self.get(name) {
            Some(id) => id,
            None => self.insert(name).unwrap(),
        }
    }

    pub(crate) fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn all(&self) -> &[String] {
        &self.names
    }
}

/// A deterministic Mealy machine with timers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mmt {
    pub(crate) states: Names,
    pub(crate) timers: Names,
    pub(crate) inputs: Names,
    pub(crate) outputs: Names,
    pub(crate) initial: StateId,
    pub(crate) active: Vec<Vec<TimerId>>,
    pub(crate) delta: Vec<Option<Transition>>,
}

impl Mmt {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_timers(&self) -> usize {
        self.timers.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states() as u32).map(StateId)
    }

    pub fn timers(&self) -> impl Iterator<Item = TimerId> {
        (0..self.num_timers() as u32).map(TimerId)
    }

    pub fn inputs(&self) -> impl Iterator<Item = InputId> {
        (0..self.num_inputs() as u32).map(InputId)
    }

    /// All actions in the global order: inputs first, then timeouts.
    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        self.inputs()
            .map(Action::Input)
            .chain(self.timers().map(Action::Timeout))
    }

    pub fn state_name(&self, q: StateId) -> &str {
        self.states.name(q.0)
    }

    pub fn timer_name(&self, x: TimerId) -> &str {
        self.timers.name(x.0)
    }

    pub fn input_name(&self, i: InputId) -> &str {
        self.inputs.name(i.0)
    }

    pub fn output_name(&self, o: OutputId) -> &str {
        self.outputs.name(o.0)
    }

    pub fn state_names(&self) -> &[String] {
        self.states.all()
    }

    pub fn timer_names(&self) -> &[String] {
        self.timers.all()
    }

    pub fn input_names(&self) -> &[String] {
        self.inputs.all()
    }

    pub fn output_names(&self) -> &[String] {
        self.outputs.all()
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.get(name).map(StateId)
    }

    pub fn timer_id(&self, name: &str) -> Option<TimerId> {
        self.timers.get(name).map(TimerId)
    }

    pub fn input_id(&self, name: &str) -> Option<InputId> {
        self.inputs.get(name).map(InputId)
    }

    pub fn output_id(&self, name: &str) -> Option<OutputId> {
        self.outputs.get(name).map(OutputId)
    }

    /// Parses `i` or `to[x]` into an action of this machine.
    pub fn parse_action(&self, s: &str) -> Result<Action, ModelError> {
        if let Some(x) = s.strip_prefix("to[").and_then(|r| r.strip_suffix(']')) {
            return self
                .timer_id(x)
                .map(Action::Timeout)
                .ok_or_else(|| ModelError::UnknownTimer(x.to_string()));
        }
        self.input_id(s)
            .map(Action::Input)
            .ok_or_else(|| ModelError::UnknownInput(s.to_string()))
    }

    pub fn action_name(&self, a: Action) -> String {
        match a {
            Action::Input(i) => self.input_name(i).to_string(),
            Action::Timeout(x) => format!("to[{}]", self.timer_name(x)),
        }
    }

    /// The sorted set of active timers of `q`.
    pub fn active(&self, q: StateId) -> &[TimerId] {
        &self.active[q.index()]
    }

    pub fn is_active(&self, q: StateId, x: TimerId) -> bool {
        self.active(q).binary_search(&x).is_ok()
    }

    fn slot(&self, q: StateId, a: Action) -> usize {
        let width = self.num_inputs() + self.num_timers();
        let col = match a {
            Action::Input(i) => i.index(),
            Action::Timeout(x) => self.num_inputs() + x.index(),
        };
        q.index() * width + col
    }

    pub fn transition(&self, q: StateId, a: Action) -> Option<&Transition> {
        self.delta[self.slot(q, a)].as_ref()
    }

    /// Defined transitions of `q` in the global action order.
    pub fn transitions(&self, q: StateId) -> impl Iterator<Item = (Action, &Transition)> + '_ {
        self.actions()
            .filter_map(move |a| self.transition(q, a).map(|t| (a, t)))
    }

    /// Performs one step, or `None` when the action is undefined.
    pub fn step(&self, q: StateId, a: Action) -> Result<Option<Transition>, ModelError> {
        if q.index() >= self.num_states() {
            return Err(ModelError::UnknownState(format!("#{}", q.0)));
        }
        match a {
            Action::Input(i) if i.index() >= self.num_inputs() => {
                return Err(ModelError::UnknownInput(format!("#{}", i.0)))
            }
            Action::Timeout(x) if x.index() >= self.num_timers() => {
                return Err(ModelError::UnknownTimer(format!("#{}", x.0)))
            }
            _ => {}
        }
        Ok(self.transition(q, a).copied())
    }

    /// The run of a word from `q`, or `None` when some step is undefined.
    pub fn run(&self, q: StateId, word: &[Action]) -> Result<Option<Run>, ModelError> {
        let mut steps = Vec::with_capacity(word.len());
        let mut cur = q;
        for &a in word {
            match self.step(cur, a)? {
                Some(t) => {
                    steps.push(Step {
                        action: a,
                        output: t.output,
                        update: t.update,
                        target: t.target,
                    });
                    cur = t.target;
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Run { start: q, steps }))
    }

    /// Checks the well-formedness conditions on active timers.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !self.active(self.initial).is_empty() {
            violations.push(Violation::InitialActive {
                state: self.state_name(self.initial).to_string(),
            });
        }
        for q in self.states() {
            for (a, t) in self.transitions(q) {
                if let Action::Timeout(x) = a {
                    if !self.is_active(q, x) {
                        violations.push(Violation::TimeoutOfInactive {
                            state: self.state_name(q).to_string(),
                            timer: self.timer_name(x).to_string(),
                        });
                    }
                    if let Update::Start(y, _) = t.update {
                        if y != x {
                            violations.push(Violation::TimeoutStartsOther {
                                state: self.state_name(q).to_string(),
                                timer: self.timer_name(x).to_string(),
                                started: self.timer_name(y).to_string(),
                            });
                        }
                    }
                }
                let started = t.update.started().map(|(y, _)| y);
                for &y in self.active(t.target) {
                    if Some(y) != started && !self.is_active(q, y) {
                        violations.push(Violation::ActiveNotInherited {
                            state: self.state_name(q).to_string(),
                            action: self.action_name(a),
                            target: self.state_name(t.target).to_string(),
                            timer: self.timer_name(y).to_string(),
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub(crate) fn from_parts(
        states: Names,
        timers: Names,
        inputs: Names,
        outputs: Names,
        initial: StateId,
        active: Vec<Vec<TimerId>>,
        delta: Vec<Option<Transition>>,
    ) -> Self {
        Mmt {
            states,
            timers,
            inputs,
            outputs,
            initial,
            active,
            delta,
        }
    }
}

/// A single step of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub action: Action,
    pub output: OutputId,
    pub update: Update,
    pub target: StateId,
}

/// A finite run: a start state followed by steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub start: StateId,
    pub steps: Vec<Step>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> StateId {
        self.steps.last().map_or(self.start, |s| s.target)
    }

    /// The state before step `k` (0-based) or after the last step for `k = len`.
    pub fn state(&self, k: usize) -> StateId {
        if k == 0 {
            self.start
        } else {
            self.steps[k - 1].target
        }
    }

    pub fn actions(&self) -> Vec<Action> {
        self.steps.iter().map(|s| s.action).collect()
    }

    pub fn outputs(&self) -> Vec<OutputId> {
        self.steps.iter().map(|s| s.output).collect()
    }
}

/// A violated well-formedness condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    InitialActive {
        state: String,
    },
    ActiveNotInherited {
        state: String,
        action: String,
        target: String,
        timer: String,
    },
    TimeoutOfInactive {
        state: String,
        timer: String,
    },
    TimeoutStartsOther {
        state: String,
        timer: String,
        started: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitialActive { state } => {
                write!(f, "initial state `{state}` has active timers")
            }
            Violation::ActiveNotInherited {
                state,
                action,
                target,
                timer,
            } => write!(
                f,
                "`{state}` --{action}--> `{target}`: timer `{timer}` becomes active without being started"
            ),
            Violation::TimeoutOfInactive { state, timer } => {
                write!(f, "`{state}` has a timeout of inactive timer `{timer}`")
            }
            Violation::TimeoutStartsOther {
                state,
                timer,
                started,
            } => write!(
                f,
                "`{state}` --to[{timer}]--> starts `{started}` instead of restarting `{timer}`"
            ),
        }
    }
}

/// The outcome of [`Mmt::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Incremental construction of an [`Mmt`] by name.
/// An edge by names: source, action, target, output and optional start.
type RawEdge = (String, String, String, String, Option<(String, u32)>);

#[derive(Clone, Debug, Default)]
pub struct MmtBuilder {
    states: Names,
    timers: Names,
    inputs: Names,
    outputs: Names,
    active: Vec<Vec<String>>,
    initial: Option<String>,
    edges: Vec<RawEdge>,
    error: Option<ModelError>,
}

impl MmtBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn timer(mut self, name: &str) -> Self {
        self.add_timer(name);
        self
    }

    pub fn timers<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.add_timer(n);
        }
        self
    }

    pub fn input(mut self, name: &str) -> Self {
        self.add_input(name);
        self
    }

    pub fn inputs<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.add_input(n);
        }
        self
    }

    pub fn output(mut self, name: &str) -> Self {
        self.outputs.intern(name);
        self
    }

    pub fn state(mut self, name: &str, active: &[&str]) -> Self {
        self.add_state(name, active);
        self
    }

    pub fn initial(mut self, name: &str) -> Self {
        self.initial = Some(name.to_string());
        self
    }

    /// Adds a transition; `action` is an input name or `to[x]`.
    pub fn edge(
        mut self,
        from: &str,
        action: &str,
        to: &str,
        output: &str,
        update: Option<(&str, u32)>,
    ) -> Self {
        self.add_edge(from, action, to, output, update);
        self
    }

    fn duplicate(&mut self, kind: &'static str, name: &str) {
        self.error.get_or_insert(ModelError::Duplicate {
            kind,
            name: name.to_string(),
        });
    }

    pub fn add_timer(&mut self, name: &str) {
        if self.timers.insert(name).is_none() {
            self.duplicate("timer", name);
        }
    }

    pub fn add_input(&mut self, name: &str) {
        if self.inputs.insert(name).is_none() {
            self.duplicate("input", name);
        }
    }

    pub fn add_output(&mut self, name: &str) {
        self.outputs.intern(name);
    }

    pub fn add_state(&mut self, name: &str, active: &[&str]) {
        if self.states.insert(name).is_none() {
            self.duplicate("state", name);
            return;
        }
        self.active
            .push(active.iter().map(|s| s.to_string()).collect());
    }

    pub fn add_edge(
        &mut self,
        from: &str,
        action: &str,
        to: &str,
        output: &str,
        update: Option<(&str, u32)>,
    ) {
        self.outputs.intern(output);
        self.edges.push((
            from.to_string(),
            action.to_string(),
            to.to_string(),
            output.to_string(),
            update.map(|(x, c)| (x.to_string(), c)),
        ));
    }

    pub fn build(self) -> Result<Mmt, ModelError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        for s in self.states.all() {
            if self.timers.get(s).is_some() {
                return Err(ModelError::NameClash(s.clone()));
            }
        }
        if self.states.len() == 0 {
            return Err(ModelError::Invalid("machine has no states".into()));
        }
        let initial = match &self.initial {
            Some(n) => StateId(
                self.states
                    .get(n)
                    .ok_or_else(|| ModelError::UnknownState(n.clone()))?,
            ),
            None => StateId(0),
        };
        let mut active = Vec::with_capacity(self.active.len());
        for set in &self.active {
            let mut ids = Vec::with_capacity(set.len());
            for x in set {
                let id = self
                    .timers
                    .get(x)
                    .ok_or_else(|| ModelError::UnknownTimer(x.clone()))?;
                ids.push(TimerId(id));
            }
            ids.sort();
            ids.dedup();
            active.push(ids);
        }
        let width = self.inputs.len() + self.timers.len();
        let mut mmt = Mmt::from_parts(
            self.states.clone(),
            self.timers.clone(),
            self.inputs.clone(),
            self.outputs.clone(),
            initial,
            active,
            vec![None; self.states.len() * width],
        );
        for (from, action, to, output, update) in &self.edges {
            let q = mmt
                .state_id(from)
                .ok_or_else(|| ModelError::UnknownState(from.clone()))?;
            let target = mmt
                .state_id(to)
                .ok_or_else(|| ModelError::UnknownState(to.clone()))?;
            let a = mmt.parse_action(action)?;
            let output = mmt.output_id(output).unwrap();
            let update = match update {
                None => Update::Bot,
                Some((x, c)) => {
                    let x = mmt
                        .timer_id(x)
                        .ok_or_else(|| ModelError::UnknownTimer(x.clone()))?;
                    if *c == 0 {
                        return Err(ModelError::ZeroConstant {
                            timer: mmt.timer_name(x).to_string(),
                        });
                    }
                    Update::Start(x, *c)
                }
            };
            let slot = mmt.slot(q, a);
            if mmt.delta[slot].is_some() {
                return Err(ModelError::Nondeterministic {
                    state: from.clone(),
                    action: action.clone(),
                });
            }
            mmt.delta[slot] = Some(Transition {
                target,
                output,
                update,
            });
        }
        Ok(mmt)
    }
}

/// Construction of an [`Mmt`] from interned ids, used by internal transformations.
#[derive(Clone, Debug, Default)]
pub(crate) struct RawMmt {
    pub states: Names,
    pub timers: Names,
    pub inputs: Names,
    pub outputs: Names,
    pub active: Vec<Vec<TimerId>>,
    pub transitions: Vec<(StateId, Action, Transition)>,
}

impl RawMmt {
    pub fn add_state(&mut self, name: &str, mut active: Vec<TimerId>) -> StateId {
        active.sort();
        active.dedup();
        let id = self.states.insert(name).expect("fresh state name");
        self.active.push(active);
        StateId(id)
    }

    pub fn finish(self, initial: StateId) -> Mmt {
        let width = self.inputs.len() + self.timers.len();
        let mut mmt = Mmt::from_parts(
            self.states,
            self.timers,
            self.inputs,
            self.outputs,
            initial,
            self.active,
            Vec::new(),
        );
        mmt.delta = vec![None; mmt.num_states() * width];
        for (q, a, t) in self.transitions {
            let slot = mmt.slot(q, a);
            mmt.delta[slot] = Some(t);
        }
        mmt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_duplicates_and_clashes() {
        let err = MmtBuilder::new()
            .timer("x")
            .timer("x")
            .state("q", &[])
            .build()
            .unwrap_err();
        assert!(matches!(err, ModelError::Duplicate { kind: "timer", .. }));

        let err = MmtBuilder::new()
            .timer("q")
            .state("q", &[])
            .build()
            .unwrap_err();
        assert_eq!(err, ModelError::NameClash("q".into()));
    }

    #[test]
    fn builder_rejects_zero_constant_and_nondeterminism() {
        let err = MmtBuilder::new()
            .timer("x")
            .input("i")
            .state("q", &[])
            .edge("q", "i", "q", "o", Some(("x", 0)))
            .build()
            .unwrap_err();
        assert!(matches!(err, ModelError::ZeroConstant { .. }));

        let err = MmtBuilder::new()
            .input("i")
            .state("q", &[])
            .edge("q", "i", "q", "o", None)
            .edge("q", "i", "q", "p", None)
            .build()
            .unwrap_err();
        assert!(matches!(err, ModelError::Nondeterministic { .. }));
    }

    #[test]
    fn validate_reports_each_condition() {
        let m = MmtBuilder::new()
            .timers(["x", "y"])
            .input("i")
            .state("a", &["x"])
            .state("b", &["x", "y"])
            .edge("a", "i", "b", "o", None)
            .edge("a", "to[x]", "a", "o", Some(("y", 1)))
            .edge("b", "to[y]", "a", "o", None)
            .build()
            .unwrap();
        let report = m.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::InitialActive { .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ActiveNotInherited { timer, .. } if timer == "y")));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::TimeoutStartsOther { .. })));
        assert!(!report.is_valid());
    }
}
