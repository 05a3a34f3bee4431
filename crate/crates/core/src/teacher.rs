//! A teacher answering output, wait and equivalence queries for a target MMT.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::equiv::{equiv_zone_mmts, EquivResult};
use crate::error::ModelError;
use crate::mmt::{Action, Mmt};
use crate::symbolic::{output_word, run_of_symbolic, symbolic_of, SymbolicAction, SymbolicWord};
use crate::zones::{build_zone_mmt, first_missing, ZoneMmt};

/// Query counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryStats {
    pub oq: u64,
    pub wq: u64,
    pub eq: u64,
}

/// A timeout enabled after a word: its symbolic name and its output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WaitAnswer {
    pub constant: u32,
    pub index: usize,
    pub output: String,
}

/// Answers queries about a complete target MMT through its zone machine.
#[derive(Clone, Debug)]
pub struct Teacher {
    target: Mmt,
    zone: ZoneMmt,
    stats: QueryStats,
    started: Instant,
}

impl Teacher {
    pub fn new(target: Mmt) -> Result<Self, ModelError> {
        if let Some((q, a)) = first_missing(&target) {
            return Err(ModelError::Incomplete {
                state: target.state_name(q).to_string(),
                action: target.action_name(a),
            });
        }
        let zone = build_zone_mmt(&target);
        Ok(Teacher {
            target,
            zone,
            stats: QueryStats::default(),
            started: Instant::now(),
        })
    }

    pub fn target(&self) -> &Mmt {
        &self.target
    }

    pub fn zone_mmt(&self) -> &ZoneMmt {
        &self.zone
    }

    pub fn inputs(&self) -> Vec<String> {
        self.target.input_names().to_vec()
    }

    pub fn stats(&self) -> QueryStats {
        self.stats
    }

    pub fn elapsed_ms(&self) -> u128 {
        self.started.elapsed().as_millis()
    }

    /// The outputs along `w`, or `None` when `w` has no run.
    pub fn oq(&mut self, w: &SymbolicWord) -> Option<Vec<String>> {
        self.stats.oq += 1;
        output_word(&self.zone.mmt, w)
    }

    /// The timeouts enabled after `w` together with their outputs, or `None`
    /// when `w` has no run.
    pub fn wq(&mut self, w: &SymbolicWord) -> Option<BTreeSet<WaitAnswer>> {
        self.stats.wq += 1;
        let m = &self.zone.mmt;
        let r = run_of_symbolic(m, w)?;
        let q = r.end();
        let mut out = BTreeSet::new();
        for x in m.timers() {
            let Some(t) = m.transition(q, Action::Timeout(x)) else {
                continue;
            };
            let mut steps = r.steps.clone();
            steps.push(crate::mmt::Step {
                action: Action::Timeout(x),
                output: t.output,
                update: t.update,
                target: t.target,
            });
            let ext = crate::mmt::Run {
                start: r.start,
                steps,
            };
            let word = symbolic_of(m, &ext).ok()?;
            if let Some(SymbolicAction::Timeout { constant, index }) = word.0.last() {
                out.insert(WaitAnswer {
                    constant: *constant,
                    index: *index,
                    output: m.output_name(t.output).to_string(),
                });
            }
        }
        Some(out)
    }

    /// Compares a hypothesis with the target.
    pub fn eq(&mut self, h: &Mmt) -> EquivResult {
        self.stats.eq += 1;
        equiv_zone_mmts(&build_zone_mmt(h), &self.zone)
    }
}
