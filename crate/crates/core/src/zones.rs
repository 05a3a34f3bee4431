//! Zones over active timers and the zone machine of an MMT.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::dbm::{Bound, Dbm};
use crate::mmt::{Action, Mmt, RawMmt, StateId, TimerId, Transition, Update};
use crate::Time;

/// A convex set of valuations over a sorted set of timers, kept in closed form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Zone {
    timers: Vec<TimerId>,
    dbm: Dbm<i64>,
}

impl Zone {
    /// The zone over no timers.
    pub fn unit() -> Self {
        Zone {
            timers: Vec::new(),
            dbm: Dbm::nonnegative(1),
        }
    }

    /// All non-negative valuations of `timers`.
    pub fn universe(timers: &[TimerId]) -> Self {
        let mut timers = timers.to_vec();
        timers.sort();
        timers.dedup();
        let mut dbm = Dbm::nonnegative(timers.len() + 1);
        dbm.close();
        Zone { timers, dbm }
    }

    pub fn timers(&self) -> &[TimerId] {
        &self.timers
    }

    pub fn is_empty(&self) -> bool {
        self.dbm.is_empty()
    }

    fn idx(&self, x: TimerId) -> Option<usize> {
        self.timers.binary_search(&x).ok().map(|k| k + 1)
    }

    fn slot(&self, x: Option<TimerId>) -> usize {
        match x {
            None => 0,
            Some(x) => self.idx(x).expect("timer in zone"),
        }
    }

    /// The bound on `x - y`, where `None` stands for the constant zero.
    pub fn bound(&self, x: Option<TimerId>, y: Option<TimerId>) -> Bound<i64> {
        self.dbm.get(self.slot(x), self.slot(y)).clone()
    }

    /// Intersects with `x - y ⋈ c`, where `None` stands for the constant zero.
    pub fn constrain(&mut self, x: Option<TimerId>, y: Option<TimerId>, b: Bound<i64>) {
        let (i, j) = (self.slot(x), self.slot(y));
        self.dbm.and(i, j, b);
    }

    pub fn with(mut self, x: Option<TimerId>, y: Option<TimerId>, b: Bound<i64>) -> Self {
        self.constrain(x, y, b);
        self
    }

    /// Whether the valuation (over exactly the zone's timers) lies in the zone.
    pub fn contains(&self, values: &BTreeMap<TimerId, Time>) -> bool {
        if self.is_empty() || values.len() != self.timers.len() {
            return false;
        }
        let mut vals = vec![Time::from_integer(0)];
        for x in &self.timers {
            match values.get(x) {
                Some(v) => vals.push(*v),
                None => return false,
            }
        }
        let n = vals.len();
        for i in 0..n {
            for j in 0..n {
                let diff = vals[i] - vals[j];
                let ok = match self.dbm.get(i, j) {
                    Bound::Le(c) => diff <= Time::from_integer(*c),
                    Bound::Lt(c) => diff < Time::from_integer(*c),
                    Bound::Inf => true,
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Lets time elapse: every timer decreases by the same non-negative amount.
    pub fn down(&self) -> Self {
        if self.is_empty() {
            return self.clone();
        }
        let mut z = self.clone();
        let n = z.timers.len() + 1;
        for i in 1..n {
            let mut b = Bound::zero();
            for j in 1..n {
                let cand = self.dbm.get(j, i).clone();
                if cand < b {
                    b = cand;
                }
            }
            z.dbm.set(0, i, b);
        }
        z.dbm.close();
        z
    }

    /// Projects onto the timers of `keep` that the zone tracks.
    pub fn restrict(&self, keep: &[TimerId]) -> Self {
        let mut keep: Vec<TimerId> = keep
            .iter()
            .copied()
            .filter(|x| self.idx(*x).is_some())
            .collect();
        keep.sort();
        keep.dedup();
        if self.is_empty() {
            let mut z = Zone::universe(&keep);
            z.dbm.make_empty();
            return z;
        }
        let slots: Vec<usize> = std::iter::once(0)
            .chain(keep.iter().map(|x| self.idx(*x).unwrap()))
            .collect();
        let n = slots.len();
        let mut dbm = Dbm::unconstrained(n);
        for (a, &i) in slots.iter().enumerate() {
            for (b, &j) in slots.iter().enumerate() {
                dbm.set(a, b, self.dbm.get(i, j).clone());
            }
        }
        Zone { timers: keep, dbm }
    }

    /// Sets `x` to `c`, adding `x` to the tracked timers if needed.
    pub fn assign(&self, x: TimerId, c: i64) -> Self {
        let mut z = if self.idx(x).is_some() {
            self.clone()
        } else {
            let mut timers = self.timers.clone();
            timers.push(x);
            timers.sort();
            let mut dbm = Dbm::nonnegative(timers.len() + 1);
            if self.is_empty() {
                dbm.make_empty();
            } else {
                let map: Vec<Option<usize>> = std::iter::once(Some(0))
                    .chain(timers.iter().map(|t| self.idx(*t)))
                    .collect();
                for (a, ia) in map.iter().enumerate() {
                    for (b, ib) in map.iter().enumerate() {
                        if let (Some(i), Some(j)) = (ia, ib) {
                            dbm.set(a, b, self.dbm.get(*i, *j).clone());
                        }
                    }
                }
            }
            Zone { timers, dbm }
        };
        if z.is_empty() {
            return z;
        }
        let k = z.idx(x).unwrap();
        let n = z.timers.len() + 1;
        for j in 0..n {
            if j == k {
                continue;
            }
            let to_j = Bound::le(c).add(z.dbm.get(0, j));
            let from_j = z.dbm.get(j, 0).add(&Bound::le(-c));
            z.dbm.set(k, j, to_j);
            z.dbm.set(j, k, from_j);
        }
        z.dbm.set(k, k, Bound::zero());
        z.dbm.close();
        z
    }

    /// Intersects with `x = 0`.
    pub fn timeout(&self, x: TimerId) -> Self {
        let mut z = self.clone();
        match z.idx(x) {
            Some(k) => z.dbm.and(k, 0, Bound::zero()),
            None => z.dbm.make_empty(),
        }
        z
    }

    /// Displays the zone using the given timer names.
    pub fn display<'a>(&'a self, m: &'a Mmt) -> ZoneDisplay<'a> {
        ZoneDisplay { zone: self, m }
    }
}

pub struct ZoneDisplay<'a> {
    zone: &'a Zone,
    m: &'a Mmt,
}

impl fmt::Display for ZoneDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.zone;
        if z.is_empty() {
            return write!(f, "∅");
        }
        if z.timers.is_empty() {
            return write!(f, "true");
        }
        let name = |k: usize| self.m.timer_name(z.timers[k - 1]).to_string();
        let mut parts = Vec::new();
        let n = z.timers.len() + 1;
        for i in 1..n {
            let lo = match z.dbm.get(0, i) {
                Bound::Le(c) => format!("{}≤", -c),
                Bound::Lt(c) => format!("{}<", -c),
                Bound::Inf => String::new(),
            };
            let hi = match z.dbm.get(i, 0) {
                Bound::Le(c) => format!("≤{c}"),
                Bound::Lt(c) => format!("<{c}"),
                Bound::Inf => String::new(),
            };
            parts.push(format!("{lo}{}{hi}", name(i)));
        }
        for i in 1..n {
            for j in 1..n {
                if i == j {
                    continue;
                }
                let b = z.dbm.get(i, j);
                let implied = z.dbm.get(i, 0).add(z.dbm.get(0, j));
                if b != &Bound::Inf && *b < implied {
                    let rel = match b {
                        Bound::Le(c) => format!("≤{c}"),
                        Bound::Lt(c) => format!("<{c}"),
                        Bound::Inf => unreachable!(),
                    };
                    parts.push(format!("{}-{}{rel}", name(i), name(j)));
                }
            }
        }
        write!(f, "{}", parts.join(", "))
    }
}

/// The zone reached by taking `t` on `a` from zone `z`, or `None` when the
/// transition cannot fire.
pub fn successor(m: &Mmt, z: &Zone, a: Action, t: &Transition) -> Option<Zone> {
    let fired = match a {
        Action::Timeout(x) => {
            let z = z.timeout(x);
            if z.is_empty() {
                return None;
            }
            z
        }
        Action::Input(_) => z.clone(),
    };
    let assigned = match t.update {
        Update::Start(y, c) => fired.assign(y, c as i64),
        Update::Bot => fired,
    };
    Some(assigned.restrict(m.active(t.target)).down())
}

/// The zone graph of an MMT, which may be partial.
#[derive(Clone, Debug)]
pub struct ZoneGraph {
    pub nodes: Vec<(StateId, Zone)>,
    pub edges: Vec<(usize, Action, usize)>,
    /// Zone nodes whose state lacks an input or an enabled timeout.
    pub missing: Vec<(usize, Action)>,
}

/// Explores all reachable `(state, zone)` pairs in breadth-first order.
pub fn explore(m: &Mmt) -> ZoneGraph {
    let mut nodes: Vec<(StateId, Zone)> = Vec::new();
    let mut index: HashMap<(StateId, Zone), usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut missing = Vec::new();
    let init = (
        m.initial(),
        Zone::unit().restrict(m.active(m.initial())).down(),
    );
    index.insert(init.clone(), 0);
    nodes.push(init);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (q, z) = nodes[k].clone();
        for a in m.actions() {
            if let Action::Timeout(x) = a {
                if !m.is_active(q, x) || z.timeout(x).is_empty() {
                    continue;
                }
            }
            let Some(t) = m.transition(q, a) else {
                missing.push((k, a));
                continue;
            };
            let Some(z2) = successor(m, &z, a, t) else {
                continue;
            };
            let key = (t.target, z2);
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
            edges.push((k, a, target));
        }
    }
    ZoneGraph {
        nodes,
        edges,
        missing,
    }
}

/// An MMT whose states are reachable `(state, zone)` pairs.
#[derive(Clone, Debug)]
pub struct ZoneMmt {
    pub mmt: Mmt,
    pub base: Vec<StateId>,
    pub zones: Vec<Zone>,
}

/// Builds the zone MMT. Zone states are named `q@k` with a per-state serial.
pub fn build_zone_mmt(m: &Mmt) -> ZoneMmt {
    let g = explore(m);
    let mut raw = RawMmt {
        timers: m.timers.clone(),
        inputs: m.inputs.clone(),
        outputs: m.outputs.clone(),
        ..RawMmt::default()
    };
    let mut serial: HashMap<StateId, usize> = HashMap::new();
    let mut ids = Vec::with_capacity(g.nodes.len());
    for (q, _) in &g.nodes {
        let k = serial.entry(*q).or_insert(0);
        let name = format!("{}@{}", m.state_name(*q), k);
        *k += 1;
        ids.push(raw.add_state(&name, m.active(*q).to_vec()));
    }
    for &(from, a, to) in &g.edges {
        let (q, _) = &g.nodes[from];
        let t = m.transition(*q, a).unwrap();
        raw.transitions.push((
            ids[from],
            a,
            Transition {
                target: ids[to],
                output: t.output,
                update: t.update,
            },
        ));
    }
    let (base, zones) = g.nodes.into_iter().unzip();
    ZoneMmt {
        mmt: raw.finish(ids[0]),
        base,
        zones,
    }
}

/// The timers of `q` that can reach zero in some reachable configuration.
pub fn enabled(m: &Mmt, q: StateId) -> BTreeSet<TimerId> {
    let g = explore(m);
    enabled_in(m, &g, q)
}

fn enabled_in(m: &Mmt, g: &ZoneGraph, q: StateId) -> BTreeSet<TimerId> {
    let mut out = BTreeSet::new();
    for (p, z) in &g.nodes {
        if *p != q {
            continue;
        }
        for &x in m.active(q) {
            if !z.timeout(x).is_empty() {
                out.insert(x);
            }
        }
    }
    out
}

/// The first state lacking an input, or lacking the timeout of a timer that
/// can reach zero there.
pub fn first_missing(m: &Mmt) -> Option<(StateId, Action)> {
    for q in m.states() {
        for i in m.inputs() {
            if m.transition(q, Action::Input(i)).is_none() {
                return Some((q, Action::Input(i)));
            }
        }
    }
    let g = explore(m);
    g.missing.first().map(|&(k, a)| (g.nodes[k].0, a))
}

/// Whether every state defines every input and every enabled timeout.
pub fn is_complete(m: &Mmt) -> bool {
    first_missing(m).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(k: u32) -> TimerId {
        TimerId(k)
    }

    #[test]
    fn assign_then_down_gives_interval() {
        let z = Zone::unit().assign(t(0), 2).down();
        assert_eq!(z.bound(Some(t(0)), None), Bound::le(2));
        assert_eq!(z.bound(None, Some(t(0))), Bound::le(0));
    }

    #[test]
    fn second_timer_keeps_difference() {
        let z = Zone::unit().assign(t(0), 2).down().assign(t(1), 3).down();
        assert_eq!(z.bound(Some(t(1)), Some(t(0))), Bound::le(3));
        assert_eq!(z.bound(Some(t(0)), Some(t(1))), Bound::le(-1));
        let zx = z.timeout(t(0));
        assert!(!zx.is_empty());
        assert!(z.timeout(t(1)).is_empty());
    }

    #[test]
    fn restrict_to_nothing() {
        let z = Zone::unit().assign(t(0), 2);
        let r = z.restrict(&[]);
        assert!(!r.is_empty());
        assert_eq!(r, Zone::unit());
        let mut e = z.clone();
        e.constrain(Some(t(0)), None, Bound::le(1));
        assert!(e.is_empty());
        assert!(e.restrict(&[]).is_empty());
    }
}
