//! Symbolic equivalence of MMTs via a product of their zone machines.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::ModelError;
use crate::mmt::{Action, Mmt, StateId, Step, TimerId, Transition};
use crate::symbolic::{output_word, Causes, SymbolicAction, SymbolicWord};
use crate::zones::{build_zone_mmt, first_missing, ZoneMmt};

/// Which side a counterexample distinguishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CexKind {
    /// The word has a run in the second machine only.
    MissingInFirst,
    /// The word has a run in the first machine only.
    MissingInSecond,
    /// Both machines read the word but produce different outputs.
    OutputMismatch,
}

impl fmt::Display for CexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CexKind::MissingInFirst => "missing in first",
            CexKind::MissingInSecond => "missing in second",
            CexKind::OutputMismatch => "output mismatch",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub word: SymbolicWord,
    pub kind: CexKind,
    pub first_outputs: Option<Vec<String>>,
    pub second_outputs: Option<Vec<String>>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |o: &Option<Vec<String>>| match o {
            Some(v) => v.join(" "),
            None => "undefined".to_string(),
        };
        write!(
            f,
            "{} ({}): {} vs {}",
            self.word,
            self.kind,
            show(&self.first_outputs),
            show(&self.second_outputs)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivResult {
    Equivalent,
    Counterexample(Counterexample),
}

impl EquivResult {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivResult::Equivalent)
    }
}

/// Decides symbolic equivalence of two complete MMTs.
pub fn symbolic_equiv(a: &Mmt, b: &Mmt) -> Result<EquivResult, ModelError> {
    for m in [a, b] {
        if let Some((q, act)) = first_missing(m) {
            return Err(ModelError::Incomplete {
                state: m.state_name(q).to_string(),
                action: m.action_name(act),
            });
        }
    }
    Ok(equiv_zone_mmts(&build_zone_mmt(a), &build_zone_mmt(b)))
}

type Pairs = Vec<(TimerId, TimerId, bool)>;
type Key = (StateId, StateId, Pairs);

#[derive(Clone, Copy)]
enum Last {
    Input(usize),
    TimeoutA(TimerId),
    TimeoutB(TimerId),
}

/// Symbolic equivalence of two zone machines, without completeness checks.
pub fn equiv_zone_mmts(za: &ZoneMmt, zb: &ZoneMmt) -> EquivResult {
    let (a, b) = (&za.mmt, &zb.mmt);
    let mut names: Vec<String> = a.input_names().to_vec();
    for i in b.input_names() {
        if !names.contains(i) {
            names.push(i.clone());
        }
    }
    let a_inputs: Vec<Option<Action>> = names
        .iter()
        .map(|n| a.input_id(n).map(Action::Input))
        .collect();
    let b_inputs: Vec<Option<Action>> = names
        .iter()
        .map(|n| b.input_id(n).map(Action::Input))
        .collect();

    let mut nodes: Vec<Key> = Vec::new();
    let mut parent: Vec<Option<(usize, Action, Action)>> = Vec::new();
    let mut index: HashMap<Key, usize> = HashMap::new();
    let init: Key = (a.initial(), b.initial(), Vec::new());
    index.insert(init.clone(), 0);
    nodes.push(init);
    parent.push(None);
    let mut queue = VecDeque::from([0usize]);

    while let Some(k) = queue.pop_front() {
        let (qa, qb, pairs) = nodes[k].clone();
        let mut moves: Vec<(Action, Action, Last)> = Vec::new();
        for (n, (ia, ib)) in a_inputs.iter().zip(&b_inputs).enumerate() {
            let ta = ia.and_then(|x| a.transition(qa, x));
            let tb = ib.and_then(|x| b.transition(qb, x));
            match (ta, tb) {
                (Some(_), Some(_)) => moves.push((ia.unwrap(), ib.unwrap(), Last::Input(n))),
                (None, None) => {}
                (Some(_), None) => {
                    return cex(
                        za,
                        zb,
                        &parent,
                        k,
                        Last::Input(n),
                        CexKind::MissingInSecond,
                        &names,
                    )
                }
                (None, Some(_)) => {
                    return cex(
                        za,
                        zb,
                        &parent,
                        k,
                        Last::Input(n),
                        CexKind::MissingInFirst,
                        &names,
                    )
                }
            }
        }
        for xa in a.timers() {
            if a.transition(qa, Action::Timeout(xa)).is_none() {
                continue;
            }
            match pairs.iter().find(|p| p.0 == xa) {
                Some(&(_, xb, false)) if b.transition(qb, Action::Timeout(xb)).is_some() => {
                    moves.push((Action::Timeout(xa), Action::Timeout(xb), Last::TimeoutA(xa)))
                }
                _ => {
                    return cex(
                        za,
                        zb,
                        &parent,
                        k,
                        Last::TimeoutA(xa),
                        CexKind::MissingInSecond,
                        &names,
                    )
                }
            }
        }
        for xb in b.timers() {
            if b.transition(qb, Action::Timeout(xb)).is_none() {
                continue;
            }
            match pairs.iter().find(|p| p.1 == xb) {
                Some(&(xa, _, false)) if a.transition(qa, Action::Timeout(xa)).is_some() => {}
                _ => {
                    return cex(
                        za,
                        zb,
                        &parent,
                        k,
                        Last::TimeoutB(xb),
                        CexKind::MissingInFirst,
                        &names,
                    )
                }
            }
        }
        for (act_a, act_b, last) in moves {
            let ta = *a.transition(qa, act_a).unwrap();
            let tb = *b.transition(qb, act_b).unwrap();
            if a.output_name(ta.output) != b.output_name(tb.output) {
                return cex(za, zb, &parent, k, last, CexKind::OutputMismatch, &names);
            }
            let key = (ta.target, tb.target, next_pairs(a, b, &pairs, &ta, &tb));
            if !index.contains_key(&key) {
                index.insert(key.clone(), nodes.len());
                nodes.push(key);
                parent.push(Some((k, act_a, act_b)));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    EquivResult::Equivalent
}

fn next_pairs(a: &Mmt, b: &Mmt, pairs: &Pairs, ta: &Transition, tb: &Transition) -> Pairs {
    let sa = ta.update.started();
    let sb = tb.update.started();
    let mut out: Pairs = pairs
        .iter()
        .copied()
        .filter(|(xa, xb, _)| {
            sa.map(|s| s.0) != Some(*xa)
                && sb.map(|s| s.0) != Some(*xb)
                && a.is_active(ta.target, *xa)
                && b.is_active(tb.target, *xb)
        })
        .collect();
    if let (Some((xa, ca)), Some((xb, cb))) = (sa, sb) {
        if a.is_active(ta.target, xa) && b.is_active(tb.target, xb) {
            out.push((xa, xb, ca != cb));
        }
    }
    out.sort();
    out
}

fn replay(m: &Mmt, actions: &[Action]) -> (SymbolicWord, Causes) {
    let mut causes = Causes::new(m);
    let mut word = SymbolicWord::new();
    let mut q = m.initial();
    for &a in actions {
        word.push(causes.name_of(a, m).expect("caused timeout"));
        let t = m.transition(q, a).expect("product path");
        causes.advance(
            &Step {
                action: a,
                output: t.output,
                update: t.update,
                target: t.target,
            },
            m,
        );
        q = t.target;
    }
    (word, causes)
}

#[allow(clippy::too_many_arguments)]
fn cex(
    za: &ZoneMmt,
    zb: &ZoneMmt,
    parent: &[Option<(usize, Action, Action)>],
    k: usize,
    last: Last,
    kind: CexKind,
    names: &[String],
) -> EquivResult {
    let mut acts_a = Vec::new();
    let mut acts_b = Vec::new();
    let mut cur = k;
    while let Some((p, xa, xb)) = parent[cur] {
        acts_a.push(xa);
        acts_b.push(xb);
        cur = p;
    }
    acts_a.reverse();
    acts_b.reverse();
    let (prefix, causes_a) = replay(&za.mmt, &acts_a);
    let (_, causes_b) = replay(&zb.mmt, &acts_b);
    let final_action = match last {
        Last::Input(n) => SymbolicAction::Input(names[n].clone()),
        Last::TimeoutA(x) => causes_a
            .name_of(Action::Timeout(x), &za.mmt)
            .expect("caused timeout"),
        Last::TimeoutB(x) => causes_b
            .name_of(Action::Timeout(x), &zb.mmt)
            .expect("caused timeout"),
    };
    let word = prefix.with(final_action);
    EquivResult::Counterexample(Counterexample {
        first_outputs: output_word(&za.mmt, &word),
        second_outputs: output_word(&zb.mmt, &word),
        word,
        kind,
    })
}
