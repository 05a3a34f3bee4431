//! Symbolic words: timeouts named by the constant and position of their start.

use std::fmt;
use std::str::FromStr;

use crate::error::ModelError;
use crate::mmt::{Action, Mmt, Run, Step, Update};

/// A symbolic action. `Timeout { constant, index }` denotes the timeout of the
/// timer started with `constant` at the `index`-th (1-based) action of the word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicAction {
    Input(String),
    Timeout { constant: u32, index: usize },
}

impl fmt::Display for SymbolicAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicAction::Input(i) => write!(f, "{i}"),
            SymbolicAction::Timeout { constant, index } => write!(f, "to[{constant},{index}]"),
        }
    }
}

impl FromStr for SymbolicAction {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(body) = s.strip_prefix("to[").and_then(|r| r.strip_suffix(']')) {
            let (c, j) = body
                .split_once(',')
                .ok_or_else(|| ModelError::Parse(format!("bad symbolic timeout `{s}`")))?;
            let constant: u32 = c
                .trim()
                .parse()
                .map_err(|_| ModelError::Parse(format!("bad constant in `{s}`")))?;
            let index: usize = j
                .trim()
                .parse()
                .map_err(|_| ModelError::Parse(format!("bad index in `{s}`")))?;
            if constant == 0 || index == 0 {
                return Err(ModelError::Parse(format!(
                    "constant and index must be positive in `{s}`"
                )));
            }
            return Ok(SymbolicAction::Timeout { constant, index });
        }
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(ModelError::Parse(format!("bad input symbol `{s}`")));
        }
        Ok(SymbolicAction::Input(s.to_string()))
    }
}

/// A sequence of symbolic actions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicWord(pub Vec<SymbolicAction>);

impl SymbolicWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, a: SymbolicAction) {
        self.0.push(a);
    }

    pub fn with(&self, a: SymbolicAction) -> Self {
        let mut w = self.clone();
        w.push(a);
        w
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SymbolicAction> {
        self.0.iter()
    }
}

impl fmt::Display for SymbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for SymbolicWord {
    type Err = ModelError;

    /// Parses whitespace-separated actions such as `i i to[2,1]`. `ε` or an
    /// empty string is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(SymbolicWord::new());
        }
        s.split_whitespace()
            .map(SymbolicAction::from_str)
            .collect::<Result<Vec<_>, _>>()
            .map(SymbolicWord)
    }
}

/// Tracks, for every timer, the symbolic name of its current start.
#[derive(Clone, Debug)]
pub(crate) struct Causes {
    cause: Vec<Option<(u32, usize)>>,
    position: usize,
}

impl Causes {
    pub(crate) fn new(m: &Mmt) -> Self {
        Causes {
            cause: vec![None; m.num_timers()],
            position: 0,
        }
    }

    pub(crate) fn name_of(&self, a: Action, m: &Mmt) -> Option<SymbolicAction> {
        match a {
            Action::Input(i) => Some(SymbolicAction::Input(m.input_name(i).to_string())),
            Action::Timeout(x) => self.cause[x.index()]
                .map(|(constant, index)| SymbolicAction::Timeout { constant, index }),
        }
    }

    pub(crate) fn resolve(&self, a: &SymbolicAction, m: &Mmt) -> Option<Action> {
        match a {
            SymbolicAction::Input(name) => m.input_id(name).map(Action::Input),
            SymbolicAction::Timeout { constant, index } => self
                .cause
                .iter()
                .position(|c| *c == Some((*constant, *index)))
                .map(|x| Action::Timeout(crate::mmt::TimerId(x as u32))),
        }
    }

    pub(crate) fn advance(&mut self, step: &Step, m: &Mmt) {
        self.position += 1;
        if let Update::Start(y, c) = step.update {
            self.cause[y.index()] = Some((c, self.position));
        }
        for x in m.timers() {
            if !m.is_active(step.target, x) {
                self.cause[x.index()] = None;
            }
        }
    }
}

/// The symbolic word of a run starting in the initial state.
pub fn symbolic_of(m: &Mmt, r: &Run) -> Result<SymbolicWord, ModelError> {
    let mut causes = Causes::new(m);
    let mut word = SymbolicWord::new();
    for (k, step) in r.steps.iter().enumerate() {
        let a = causes
            .name_of(step.action, m)
            .ok_or(ModelError::UncausedTimeout { position: k + 1 })?;
        word.push(a);
        causes.advance(step, m);
    }
    Ok(word)
}

/// The run of `m` from its initial state that reads the symbolic word `w`.
pub fn run_of_symbolic(m: &Mmt, w: &SymbolicWord) -> Option<Run> {
    let mut causes = Causes::new(m);
    let mut steps = Vec::with_capacity(w.len());
    let mut q = m.initial();
    for a in w.iter() {
        let action = causes.resolve(a, m)?;
        let t = m.transition(q, action)?;
        let step = Step {
            action,
            output: t.output,
            update: t.update,
            target: t.target,
        };
        causes.advance(&step, m);
        steps.push(step);
        q = t.target;
    }
    Some(Run {
        start: m.initial(),
        steps,
    })
}

/// The outputs produced while reading `w`, or `None` if `w` has no run.
pub fn output_word(m: &Mmt, w: &SymbolicWord) -> Option<Vec<String>> {
    let r = run_of_symbolic(m, w)?;
    Some(
        r.steps
            .iter()
            .map(|s| m.output_name(s.output).to_string())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let w: SymbolicWord = "i i to[2,1] to[3,2]".parse().unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(
            w.0[2],
            SymbolicAction::Timeout {
                constant: 2,
                index: 1
            }
        );
        assert_eq!(w.to_string(), "i i to[2,1] to[3,2]");
        assert_eq!("ε".parse::<SymbolicWord>().unwrap(), SymbolicWord::new());
        assert!("to[0,1]".parse::<SymbolicWord>().is_err());
        assert!("to[2]".parse::<SymbolicWord>().is_err());
    }
}
