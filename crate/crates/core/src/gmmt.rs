//! Generalized MMTs whose transitions rename timers, and their conversion to MMTs.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::ModelError;
use crate::mmt::{Action, Mmt, Names, OutputId, RawMmt, StateId, TimerId, Transition, Update};
use crate::scalar::Scalar;
use crate::timed::{Configuration, Event};
use crate::zones;

/// The value assigned to a timer by a generalized update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Timer(TimerId),
    Const(u32),
}

/// Assignments `dest := source`, sorted by destination.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GUpdate(pub Vec<(TimerId, Source)>);

impl GUpdate {
    pub fn get(&self, dest: TimerId) -> Option<Source> {
        self.0
            .binary_search_by_key(&dest, |(d, _)| *d)
            .ok()
            .map(|k| self.0[k].1)
    }

    /// The timer assigned a constant, if any.
    pub fn started(&self) -> Option<(TimerId, u32)> {
        self.0.iter().find_map(|(d, s)| match s {
            Source::Const(c) => Some((*d, *c)),
            Source::Timer(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GTransition {
    pub target: StateId,
    pub output: OutputId,
    pub update: GUpdate,
}

/// A Mealy machine with timers whose transitions assign every active timer of
/// the target either a constant or the value of a source timer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gmmt {
    pub(crate) states: Names,
    pub(crate) timers: Names,
    pub(crate) inputs: Names,
    pub(crate) outputs: Names,
    pub(crate) initial: StateId,
    pub(crate) active: Vec<Vec<TimerId>>,
    pub(crate) delta: Vec<Option<GTransition>>,
}

impl Gmmt {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_timers(&self) -> usize {
        self.timers.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states() as u32).map(StateId)
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> {
        let ni = self.inputs.len() as u32;
        let nt = self.timers.len() as u32;
        (0..ni)
            .map(|i| Action::Input(crate::mmt::InputId(i)))
            .chain((0..nt).map(|x| Action::Timeout(TimerId(x))))
    }

    pub fn state_name(&self, q: StateId) -> &str {
        self.states.name(q.0)
    }

    pub fn timer_name(&self, x: TimerId) -> &str {
        self.timers.name(x.0)
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

    pub fn action_name(&self, a: Action) -> String {
        match a {
            Action::Input(i) => self.inputs.name(i.0).to_string(),
            Action::Timeout(x) => format!("to[{}]", self.timer_name(x)),
        }
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.get(name).map(StateId)
    }

    pub fn active(&self, q: StateId) -> &[TimerId] {
        &self.active[q.index()]
    }

    pub fn is_active(&self, q: StateId, x: TimerId) -> bool {
        self.active(q).binary_search(&x).is_ok()
    }

    fn slot(&self, q: StateId, a: Action) -> usize {
        let width = self.inputs.len() + self.timers.len();
        let col = match a {
            Action::Input(i) => i.index(),
            Action::Timeout(x) => self.inputs.len() + x.index(),
        };
        q.index() * width + col
    }

    pub fn transition(&self, q: StateId, a: Action) -> Option<&GTransition> {
        self.delta[self.slot(q, a)].as_ref()
    }

    pub fn transitions(&self, q: StateId) -> impl Iterator<Item = (Action, &GTransition)> + '_ {
        self.actions()
            .filter_map(move |a| self.transition(q, a).map(|t| (a, t)))
    }

    /// Formats an update as `{y:=x, x:=2}`.
    pub fn update_name(&self, u: &GUpdate) -> String {
        let parts: Vec<String> =
            u.0.iter()
                .map(|(d, s)| match s {
                    Source::Timer(x) => format!("{}:={}", self.timer_name(*d), self.timer_name(*x)),
                    Source::Const(c) => format!("{}:={c}", self.timer_name(*d)),
                })
                .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// A violated well-formedness condition of a generalized MMT.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GViolation(pub String);

impl fmt::Display for GViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Checks the well-formedness conditions of a generalized MMT.
pub fn validate_gmmt(g: &Gmmt) -> Vec<GViolation> {
    let mut out = Vec::new();
    if !g.active(g.initial).is_empty() {
        out.push(GViolation(format!(
            "initial state `{}` has active timers",
            g.state_name(g.initial)
        )));
    }
    for q in g.states() {
        for (a, t) in g.transitions(q) {
            let here = format!("`{}` --{}-->", g.state_name(q), g.action_name(a));
            if let Action::Timeout(x) = a {
                if !g.is_active(q, x) {
                    out.push(GViolation(format!("{here} times out an inactive timer")));
                }
            }
            let dests: Vec<TimerId> = t.update.0.iter().map(|(d, _)| *d).collect();
            if dests != g.active(t.target) {
                out.push(GViolation(format!(
                    "{here} does not assign exactly the active timers of `{}`",
                    g.state_name(t.target)
                )));
            }
            let mut seen = Vec::new();
            let mut constants = 0;
            for (_, s) in &t.update.0 {
                match s {
                    Source::Const(_) => constants += 1,
                    Source::Timer(x) => {
                        if !g.is_active(q, *x) {
                            out.push(GViolation(format!(
                                "{here} copies inactive timer `{}`",
                                g.timer_name(*x)
                            )));
                        }
                        if a == Action::Timeout(*x) {
                            out.push(GViolation(format!(
                                "{here} copies the expired timer `{}`",
                                g.timer_name(*x)
                            )));
                        }
                        if seen.contains(x) {
                            out.push(GViolation(format!(
                                "{here} copies `{}` twice",
                                g.timer_name(*x)
                            )));
                        }
                        seen.push(*x);
                    }
                }
            }
            if constants > 1 {
                out.push(GViolation(format!("{here} starts more than one timer")));
            }
        }
    }
    out
}

/// One step of the timed semantics of a generalized MMT.
pub fn gmmt_step<T: Scalar>(
    g: &Gmmt,
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
            let t = g.transition(c.state, *a)?;
            let mut values = BTreeMap::new();
            for (d, s) in &t.update.0 {
                let v = match s {
                    Source::Const(k) => T::from_int(*k as i64),
                    Source::Timer(x) => c.values.get(x)?.clone(),
                };
                values.insert(*d, v);
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

/// Converts a complete generalized MMT into an equivalent MMT over a pool of
/// timers `x1..xn`, where `n` is the largest number of active timers.
pub fn gmmt_to_mmt(g: &Gmmt) -> Result<Mmt, ModelError> {
    let violations = validate_gmmt(g);
    if let Some(v) = violations.first() {
        return Err(ModelError::Invalid(v.to_string()));
    }
    let m = gmmt_to_mmt_unchecked(g);
    if let Some((q, a)) = zones::first_missing(&m) {
        return Err(ModelError::Incomplete {
            state: m.state_name(q).to_string(),
            action: m.action_name(a),
        });
    }
    Ok(m)
}

type Placement = Vec<(TimerId, u32)>;

/// Converts without checking validity or completeness.
pub fn gmmt_to_mmt_unchecked(g: &Gmmt) -> Mmt {
    let pool = g.active.iter().map(Vec::len).max().unwrap_or(0) as u32;
    let mut nodes: Vec<(StateId, Placement)> = Vec::new();
    let mut index: HashMap<(StateId, Placement), usize> = HashMap::new();
    let mut edges: Vec<(usize, Action, usize, OutputId, Update)> = Vec::new();
    let init = (g.initial, Vec::new());
    index.insert(init.clone(), 0);
    nodes.push(init);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (q, mu) = nodes[k].clone();
        let lookup = |x: TimerId| mu.iter().find(|(y, _)| *y == x).map(|(_, p)| *p);
        for (a, t) in g.transitions(q) {
            let action = match a {
                Action::Input(i) => Action::Input(i),
                Action::Timeout(x) => match lookup(x) {
                    Some(p) => Action::Timeout(TimerId(p)),
                    None => continue,
                },
            };
            let mut nu: Placement = Vec::new();
            let mut fresh: Option<(TimerId, u32)> = None;
            for (d, s) in &t.update.0 {
                match s {
                    Source::Timer(x) => {
                        if let Some(p) = lookup(*x) {
                            nu.push((*d, p));
                        }
                    }
                    Source::Const(c) => fresh = Some((*d, *c)),
                }
            }
            let update = match fresh {
                Some((d, c)) => {
                    let p = match action {
                        Action::Timeout(TimerId(p)) => p,
                        Action::Input(_) => (0..pool.max(1))
                            .find(|p| nu.iter().all(|(_, r)| r != p))
                            .unwrap_or(pool),
                    };
                    nu.push((d, p));
                    Update::Start(TimerId(p), c)
                }
                None => Update::Bot,
            };
            nu.sort();
            let key = (t.target, nu);
            let target = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    index.insert(key.clone(), id);
                    nodes.push(key);
                    queue.push_back(id);
                    id
                }
            };
            edges.push((k, action, target, t.output, update));
        }
    }

    let pool_len = pool.max(
        nodes
            .iter()
            .flat_map(|(_, mu)| mu.iter().map(|(_, p)| p + 1))
            .max()
            .unwrap_or(0),
    );
    let state_name = |(q, mu): &(StateId, Placement), prefix: &str| -> String {
        if mu.is_empty() {
            g.state_name(*q).to_string()
        } else {
            let parts: Vec<String> = mu
                .iter()
                .map(|(x, p)| format!("{}={prefix}x{}", g.timer_name(*x), p + 1))
                .collect();
            format!("{}[{}]", g.state_name(*q), parts.join(","))
        }
    };
    let mut prefix = String::new();
    loop {
        let names: Vec<String> = nodes.iter().map(|n| state_name(n, &prefix)).collect();
        let clash = (0..pool_len).any(|p| names.contains(&format!("{prefix}x{}", p + 1)));
        if !clash {
            break;
        }
        prefix.push('_');
    }

    let mut raw = RawMmt {
        inputs: g.inputs.clone(),
        outputs: g.outputs.clone(),
        ..RawMmt::default()
    };
    for p in 0..pool_len {
        raw.timers.insert(&format!("{prefix}x{}", p + 1));
    }
    let ids: Vec<StateId> = nodes
        .iter()
        .map(|n| {
            let active = n.1.iter().map(|(_, p)| TimerId(*p)).collect();
            raw.add_state(&state_name(n, &prefix), active)
        })
        .collect();
    for (from, a, to, output, update) in edges {
        raw.transitions.push((
            ids[from],
            a,
            Transition {
                target: ids[to],
                output,
                update,
            },
        ));
    }
    raw.finish(ids[0])
}

/// Incremental construction of a [`Gmmt`] by name.
/// An edge by names: source, action, target, output and assignments.
type RawEdge = (String, String, String, String, Vec<(String, String)>);

#[derive(Clone, Debug, Default)]
pub struct GmmtBuilder {
    states: Names,
    timers: Names,
    inputs: Names,
    outputs: Names,
    active: Vec<Vec<String>>,
    initial: Option<String>,
    edges: Vec<RawEdge>,
    error: Option<ModelError>,
}

impl GmmtBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn duplicate(&mut self, kind: &'static str, name: &str) {
        self.error.get_or_insert(ModelError::Duplicate {
            kind,
            name: name.to_string(),
        });
    }

    pub fn timers<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.add_timer(n);
        }
        self
    }

    pub fn inputs<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.add_input(n);
        }
        self
    }

    pub fn output(mut self, name: &str) -> Self {
        self.add_output(name);
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

    /// Adds a transition. Each assignment is `(dest, source)` where the source
    /// is a timer name or a positive integer constant.
    pub fn edge(
        mut self,
        from: &str,
        action: &str,
        to: &str,
        output: &str,
        assign: &[(&str, &str)],
    ) -> Self {
        self.add_edge(from, action, to, output, assign);
        self
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
        assign: &[(&str, &str)],
    ) {
        self.outputs.intern(output);
        self.edges.push((
            from.to_string(),
            action.to_string(),
            to.to_string(),
            output.to_string(),
            assign
                .iter()
                .map(|(d, s)| (d.to_string(), s.to_string()))
                .collect(),
        ));
    }

    pub fn build(self) -> Result<Gmmt, ModelError> {
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
        let timer = |x: &str| {
            self.timers
                .get(x)
                .map(TimerId)
                .ok_or_else(|| ModelError::UnknownTimer(x.to_string()))
        };
        let state = |q: &str| {
            self.states
                .get(q)
                .map(StateId)
                .ok_or_else(|| ModelError::UnknownState(q.to_string()))
        };
        let initial = match &self.initial {
            Some(n) => state(n)?,
            None => StateId(0),
        };
        let mut active = Vec::new();
        for set in &self.active {
            let mut ids = set
                .iter()
                .map(|x| timer(x))
                .collect::<Result<Vec<_>, _>>()?;
            ids.sort();
            ids.dedup();
            active.push(ids);
        }
        let width = self.inputs.len() + self.timers.len();
        let mut g = Gmmt {
            states: self.states.clone(),
            timers: self.timers.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial,
            active,
            delta: vec![None; self.states.len() * width],
        };
        for (from, action, to, output, assign) in &self.edges {
            let q = state(from)?;
            let target = state(to)?;
            let a = if let Some(x) = action.strip_prefix("to[").and_then(|r| r.strip_suffix(']')) {
                Action::Timeout(timer(x)?)
            } else {
                Action::Input(crate::mmt::InputId(
                    self.inputs
                        .get(action)
                        .ok_or_else(|| ModelError::UnknownInput(action.clone()))?,
                ))
            };
            let mut update = Vec::new();
            for (d, s) in assign {
                let d = timer(d)?;
                let src = match s.parse::<u32>() {
                    Ok(0) => {
                        return Err(ModelError::ZeroConstant {
                            timer: g.timer_name(d).to_string(),
                        })
                    }
                    Ok(c) => Source::Const(c),
                    Err(_) => Source::Timer(timer(s)?),
                };
                if update.iter().any(|(e, _)| *e == d) {
                    return Err(ModelError::Invalid(format!(
                        "timer `{}` assigned twice",
                        g.timer_name(d)
                    )));
                }
                update.push((d, src));
            }
            update.sort();
            let slot = g.slot(q, a);
            if g.delta[slot].is_some() {
                return Err(ModelError::Nondeterministic {
                    state: from.clone(),
                    action: action.clone(),
                });
            }
            g.delta[slot] = Some(GTransition {
                target,
                output: OutputId(self.outputs.get(output).unwrap()),
                update: GUpdate(update),
            });
        }
        Ok(g)
    }
}
