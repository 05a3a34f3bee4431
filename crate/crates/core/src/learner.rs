//! Active learning of MMTs from output, wait and equivalence queries.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::equiv::{Counterexample, EquivResult};
use crate::error::{LearnError, ModelError};
use crate::gmmt::{gmmt_to_mmt_unchecked, Gmmt, GmmtBuilder};
use crate::mmt::{Mmt, MmtBuilder};
use crate::obs_tree::{
    ApartCase, Matching, NodeId, ObsTree, ReplayOutcome, TreeAction, TreeUpdate,
};
use crate::symbolic::{SymbolicAction, SymbolicWord};
use crate::teacher::{QueryStats, Teacher};

/// Learner limits and diagnostics.
#[derive(Clone, Debug)]
pub struct LearnerConfig {
    /// Maximum number of equivalence queries.
    pub max_rounds: usize,
    /// Maximum depth of a frontier node. Defaults to ten times the number of
    /// states of the target's zone machine.
    pub max_depth: Option<usize>,
    /// Print progress to standard error.
    pub verbose: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            max_rounds: 50,
            max_depth: None,
            verbose: false,
        }
    }
}

/// A hypothesis: an MMT when the timer equivalence is consistent, otherwise a
/// generalized MMT.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Mmt(Mmt),
    Gmmt(Gmmt),
}

impl Hypothesis {
    pub fn num_states(&self) -> usize {
        match self {
            Hypothesis::Mmt(m) => m.num_states(),
            Hypothesis::Gmmt(g) => g.num_states(),
        }
    }

    pub fn to_mmt(&self) -> Mmt {
        match self {
            Hypothesis::Mmt(m) => m.clone(),
            Hypothesis::Gmmt(g) => gmmt_to_mmt_unchecked(g),
        }
    }
}

/// Query counts and timing of a learning run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LearnStats {
    pub oq: u64,
    pub wq: u64,
    pub eq: u64,
    pub ms: u128,
    pub rounds: usize,
    pub hypothesis_states: usize,
}

impl LearnStats {
    fn from_queries(q: QueryStats, ms: u128, rounds: usize, hypothesis_states: usize) -> Self {
        LearnStats {
            oq: q.oq,
            wq: q.wq,
            eq: q.eq,
            ms,
            rounds,
            hypothesis_states,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LearnResult {
    /// The learned machine as an MMT.
    pub model: Mmt,
    /// The final hypothesis before any conversion.
    pub hypothesis: Hypothesis,
    pub stats: LearnStats,
    pub tree_size: usize,
}

/// Learns a complete target MMT.
pub fn learn(target: &Mmt, config: &LearnerConfig) -> Result<LearnResult, LearnError> {
    let mut teacher = Teacher::new(target.clone())?;
    let mut config = config.clone();
    if config.max_depth.is_none() {
        config.max_depth = Some(10 * teacher.zone_mmt().mmt.num_states().max(1));
    }
    let mut learner = Learner::new(teacher.inputs(), config);
    learner.run(&mut teacher)
}

type StuckKey = (NodeId, NodeId, Matching, Option<(NodeId, Matching)>, u64);

/// The learner state: an observation tree with a basis.
#[derive(Clone, Debug)]
pub struct Learner {
    tree: ObsTree,
    basis: BTreeSet<NodeId>,
    snapshot: BTreeMap<NodeId, usize>,
    apart: HashSet<(NodeId, NodeId, Matching)>,
    stuck: HashSet<StuckKey>,
    folds: BTreeMap<NodeId, (NodeId, Matching)>,
    config: LearnerConfig,
}

fn inverse(m: &Matching) -> Matching {
    m.iter().map(|(a, b)| (*b, *a)).collect()
}

impl Learner {
    pub fn new(inputs: Vec<String>, config: LearnerConfig) -> Self {
        let tree = ObsTree::new(inputs);
        let mut snapshot = BTreeMap::new();
        snapshot.insert(tree.root(), 0);
        Learner {
            basis: BTreeSet::from([tree.root()]),
            tree,
            snapshot,
            apart: HashSet::new(),
            stuck: HashSet::new(),
            folds: BTreeMap::new(),
            config,
        }
    }

    /// A learner over an existing tree with the given basis.
    pub fn from_tree(tree: ObsTree, basis: BTreeSet<NodeId>, config: LearnerConfig) -> Self {
        let snapshot = basis.iter().map(|p| (*p, tree.active(*p).len())).collect();
        Learner {
            tree,
            basis,
            snapshot,
            apart: HashSet::new(),
            stuck: HashSet::new(),
            folds: BTreeMap::new(),
            config,
        }
    }

    pub fn tree(&self) -> &ObsTree {
        &self.tree
    }

    pub fn basis(&self) -> &BTreeSet<NodeId> {
        &self.basis
    }

    fn log(&self, msg: impl FnOnce() -> String) {
        if self.config.verbose {
            eprintln!("[learner] {}", msg());
        }
    }

    /// Children of basis nodes outside the basis, in id order.
    pub fn frontier(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .basis
            .iter()
            .flat_map(|&p| self.tree.children(p).map(|(_, c)| c))
            .filter(|c| !self.basis.contains(c))
            .collect();
        out.sort();
        out
    }

    fn is_apart(&mut self, m: &Matching, p: NodeId, r: NodeId) -> bool {
        let key = (p, r, m.clone());
        if self.apart.contains(&key) {
            return true;
        }
        if self.tree.check_apart(m, p, r).is_some() {
            self.apart.insert(key);
            return true;
        }
        false
    }

    /// The basis nodes and matchings not yet known to be apart from `r`.
    pub fn compat(&mut self, r: NodeId) -> Vec<(NodeId, Matching)> {
        let mut out = Vec::new();
        let basis: Vec<NodeId> = self.basis.iter().copied().collect();
        for p in basis {
            for m in self.tree.maximal_matchings(p, r) {
                if !self.is_apart(&m, p, r) {
                    out.push((p, m));
                }
            }
        }
        out
    }

    fn seismic(&mut self) -> bool {
        let changed = self
            .basis
            .iter()
            .any(|p| self.tree.active(*p).len() != self.snapshot[p]);
        if changed {
            self.log(|| "active timers of the basis changed; resetting basis".into());
            let root = self.tree.root();
            self.basis = BTreeSet::from([root]);
            self.snapshot = BTreeMap::from([(root, self.tree.active(root).len())]);
        }
        changed
    }

    fn add_to_basis(&mut self, r: NodeId) {
        self.basis.insert(r);
        self.snapshot.insert(r, self.tree.active(r).len());
    }

    fn check_depth(&self, frontier: &[NodeId]) -> Result<(), LearnError> {
        let Some(max) = self.config.max_depth else {
            return Ok(());
        };
        if frontier.iter().any(|r| self.tree.depth(*r) > max) {
            return Err(LearnError::DepthLimit(max));
        }
        Ok(())
    }

    /// Applies refinement rules until none applies.
    pub fn refine(&mut self, teacher: &mut Teacher) -> Result<(), LearnError> {
        'outer: loop {
            self.seismic();
            let frontier = self.frontier();
            self.check_depth(&frontier)?;

            let unexplored = self
                .basis
                .iter()
                .chain(frontier.iter())
                .copied()
                .find(|q| !self.tree.is_explored(*q));
            if let Some(q) = unexplored {
                self.tree.explore(q, teacher)?;
                continue;
            }

            let mut compat: BTreeMap<NodeId, Vec<(NodeId, Matching)>> = BTreeMap::new();
            for &r in &frontier {
                let c = self.compat(r);
                if c.is_empty() {
                    self.log(|| format!("promoting t{r}"));
                    self.add_to_basis(r);
                    continue 'outer;
                }
                compat.insert(r, c);
            }

            let basis: Vec<NodeId> = self.basis.iter().copied().collect();
            for p in basis {
                for i in 0..self.tree.inputs().len() {
                    if self.tree.child(p, TreeAction::Input(i)).is_none() {
                        self.tree.extend_input(p, i, teacher)?;
                        continue 'outer;
                    }
                }
            }

            for (&r, pairs) in &compat {
                for (p, m) in pairs {
                    let (np, nr) = (self.tree.active(*p).len(), self.tree.active(r).len());
                    if np == nr {
                        continue;
                    }
                    let key = (r, *p, m.clone(), None, self.tree.revision());
                    if self.stuck.contains(&key) {
                        continue;
                    }
                    let before = self.tree.revision();
                    if np > nr {
                        let x = *self
                            .tree
                            .active(*p)
                            .iter()
                            .find(|x| !m.contains_key(x))
                            .expect("unmatched timer");
                        let Some(d) = self.tree.shortest_timeout(*p, x) else {
                            self.stuck.insert(key);
                            continue;
                        };
                        self.log(|| format!("replaying run to to[x{x}] of t{p} at t{r}"));
                        self.tree.replay(m, *p, d, r, teacher)?;
                    } else {
                        let inv = inverse(m);
                        let y = *self
                            .tree
                            .active(r)
                            .iter()
                            .find(|y| !inv.contains_key(y))
                            .expect("unmatched timer");
                        let Some(d) = self.tree.shortest_timeout(r, y) else {
                            self.stuck.insert(key);
                            continue;
                        };
                        self.log(|| format!("replaying run to to[x{y}] of t{r} at t{p}"));
                        self.tree.replay(&inv, r, d, *p, teacher)?;
                    }
                    if self.tree.revision() != before {
                        continue 'outer;
                    }
                    self.stuck.insert(key);
                }
            }

            for (&r, pairs) in &compat {
                for (p, mu) in pairs {
                    for (p2, mu2) in pairs {
                        if p == p2 {
                            continue;
                        }
                        let key = (
                            r,
                            *p,
                            mu.clone(),
                            Some((*p2, mu2.clone())),
                            self.tree.revision(),
                        );
                        if self.stuck.contains(&key) {
                            continue;
                        }
                        let inv2 = inverse(mu2);
                        let Some(m) = mu
                            .iter()
                            .map(|(x, y)| inv2.get(y).map(|z| (*x, *z)))
                            .collect::<Option<Matching>>()
                        else {
                            self.stuck.insert(key);
                            continue;
                        };
                        let Some(w) = self.tree.check_apart_behavioral(&m, *p, *p2) else {
                            self.stuck.insert(key);
                            continue;
                        };
                        let mut end = w.end;
                        if w.case == ApartCase::Constants {
                            let TreeUpdate::Start(x, _) = self.tree.update(end) else {
                                self.stuck.insert(key);
                                continue;
                            };
                            match self.tree.shortest_timeout(end, x) {
                                Some(e) => end = e,
                                None => {
                                    self.stuck.insert(key);
                                    continue;
                                }
                            }
                        }
                        let before = self.tree.revision();
                        self.log(|| {
                            format!("separating t{r} from t{p} or t{p2} by replaying at t{r}")
                        });
                        self.tree.replay(mu, *p, end, r, teacher)?;
                        if self.tree.revision() != before {
                            continue 'outer;
                        }
                        self.stuck.insert(key);
                    }
                }
            }
            return Ok(());
        }
    }

    fn choose_folds(&mut self) -> Result<BTreeMap<NodeId, (NodeId, Matching)>, LearnError> {
        let mut folds = BTreeMap::new();
        for r in self.frontier() {
            let pair = self
                .compat(r)
                .into_iter()
                .find(|(p, _)| self.tree.active(*p).len() == self.tree.active(r).len())
                .ok_or_else(|| {
                    LearnError::Stuck(format!(
                        "frontier node t{r} has no basis node of equal size"
                    ))
                })?;
            folds.insert(r, pair);
        }
        Ok(folds)
    }

    /// Builds a hypothesis from the current basis and frontier.
    pub fn build_hypothesis(&mut self) -> Result<Hypothesis, LearnError> {
        let folds = self.choose_folds()?;
        self.folds = folds.clone();
        let basis: Vec<NodeId> = self.basis.iter().copied().collect();

        let mut classes: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for &p in &basis {
            for &x in self.tree.active(p) {
                classes.insert(x, x);
            }
        }
        for &r in folds.keys() {
            for &x in self.tree.active(r) {
                classes.entry(x).or_insert(x);
            }
        }
        fn find(c: &mut BTreeMap<NodeId, NodeId>, x: NodeId) -> NodeId {
            let p = c[&x];
            if p == x {
                return x;
            }
            let root = find(c, p);
            c.insert(x, root);
            root
        }
        for (_, m) in folds.values() {
            for (x, y) in m {
                let (a, b) = (find(&mut classes, *x), find(&mut classes, *y));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    classes.insert(hi, lo);
                }
            }
        }
        let keys: Vec<NodeId> = classes.keys().copied().collect();
        let mut members: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for x in keys {
            let root = find(&mut classes, x);
            members.entry(root).or_default().push(x);
        }
        let valid = members.values().all(|ms| {
            ms.iter()
                .enumerate()
                .all(|(k, x)| ms[k + 1..].iter().all(|y| !self.tree.timer_apart(*x, *y)))
        });
        let target = |c: NodeId| -> NodeId {
            if self.basis.contains(&c) {
                c
            } else {
                folds[&c].0
            }
        };
        let inputs = self.tree.inputs().to_vec();
        if valid {
            let used: BTreeSet<NodeId> = basis
                .iter()
                .flat_map(|p| self.tree.active(*p).iter().map(|x| classes[x]))
                .collect();
            let names: BTreeMap<NodeId, String> = used
                .iter()
                .enumerate()
                .map(|(k, c)| (*c, format!("y{}", k + 1)))
                .collect();
            let name = |x: NodeId| names[&classes[&x]].clone();
            let mut b = MmtBuilder::new();
            for n in names.values() {
                b.add_timer(n);
            }
            for i in &inputs {
                b.add_input(i);
            }
            for &p in &basis {
                let active: Vec<String> = self.tree.active(p).iter().map(|x| name(*x)).collect();
                let refs: Vec<&str> = active.iter().map(String::as_str).collect();
                b.add_state(&format!("t{p}"), &refs);
            }
            for &p in &basis {
                for (a, c) in self.tree.children(p) {
                    let action = match a {
                        TreeAction::Input(i) => inputs[i].clone(),
                        TreeAction::Timeout(x) => format!("to[{}]", name(x)),
                    };
                    let update = match self.tree.update(c) {
                        TreeUpdate::Start(x, k) => Some((name(x), k)),
                        _ => None,
                    };
                    b.add_edge(
                        &format!("t{p}"),
                        &action,
                        &format!("t{}", target(c)),
                        self.tree.output(c).unwrap(),
                        update.as_ref().map(|(x, k)| (x.as_str(), *k)),
                    );
                }
            }
            let m = b.build()?;
            self.log(|| format!("hypothesis with {} states", m.num_states()));
            Ok(Hypothesis::Mmt(m))
        } else {
            let timers: BTreeSet<NodeId> = basis
                .iter()
                .flat_map(|p| self.tree.active(*p).iter().copied())
                .collect();
            let tname = |x: NodeId| format!("x{x}");
            let mut b = GmmtBuilder::new();
            for x in &timers {
                b.add_timer(&tname(*x));
            }
            for i in &inputs {
                b.add_input(i);
            }
            for &p in &basis {
                let active: Vec<String> = self.tree.active(p).iter().map(|x| tname(*x)).collect();
                let refs: Vec<&str> = active.iter().map(String::as_str).collect();
                b.add_state(&format!("t{p}"), &refs);
            }
            for &p in &basis {
                for (a, c) in self.tree.children(p) {
                    let action = match a {
                        TreeAction::Input(i) => inputs[i].clone(),
                        TreeAction::Timeout(x) => format!("to[{}]", tname(x)),
                    };
                    let started = match self.tree.update(c) {
                        TreeUpdate::Start(x, k) => Some((x, k)),
                        _ => None,
                    };
                    let source = |y: NodeId| match started {
                        Some((s, k)) if s == y => k.to_string(),
                        _ => tname(y),
                    };
                    let assign: Vec<(String, String)> = if self.basis.contains(&c) {
                        self.tree
                            .active(c)
                            .iter()
                            .map(|y| (tname(*y), source(*y)))
                            .collect()
                    } else {
                        let (_, m) = &folds[&c];
                        m.iter().map(|(x, y)| (tname(*x), source(*y))).collect()
                    };
                    let refs: Vec<(&str, &str)> = assign
                        .iter()
                        .map(|(d, s)| (d.as_str(), s.as_str()))
                        .collect();
                    b.add_edge(
                        &format!("t{p}"),
                        &action,
                        &format!("t{}", target(c)),
                        self.tree.output(c).unwrap(),
                        &refs,
                    );
                }
            }
            let g = b.build()?;
            self.log(|| format!("generalized hypothesis with {} states", g.num_states()));
            Ok(Hypothesis::Gmmt(g))
        }
    }

    fn fold_broken(&mut self) -> bool {
        let folds: Vec<(NodeId, NodeId, Matching)> = self
            .folds
            .iter()
            .map(|(r, (p, m))| (*r, *p, m.clone()))
            .collect();
        folds.iter().any(|(r, p, m)| self.is_apart(m, *p, *r))
            || self
                .basis
                .iter()
                .any(|p| self.tree.active(*p).len() != self.snapshot[p])
    }

    /// Adds a counterexample to the tree and replays it until the current
    /// hypothesis is invalidated.
    pub fn process_counterexample(
        &mut self,
        cex: &SymbolicWord,
        teacher: &mut Teacher,
    ) -> Result<(), LearnError> {
        let mut q = self.tree.root();
        for a in cex.iter() {
            self.tree.explore(q, teacher)?;
            let next = match a {
                SymbolicAction::Input(name) => {
                    let i = self
                        .tree
                        .input_index(name)
                        .ok_or_else(|| LearnError::Model(ModelError::UnknownInput(name.clone())))?;
                    Some(self.tree.input_child(q, i, teacher)?)
                }
                SymbolicAction::Timeout { constant, index } => {
                    let path = self.tree.path(q);
                    if *index >= path.len() {
                        None
                    } else {
                        let n = path[*index];
                        let x = match self.tree.parent(n).unwrap().1 {
                            TreeAction::Input(_) => n,
                            TreeAction::Timeout(y) => y,
                        };
                        match self.tree.update(n) {
                            TreeUpdate::Start(y, c) if y == x && c == *constant => {
                                self.tree.child(q, TreeAction::Timeout(x))
                            }
                            _ => None,
                        }
                    }
                }
            };
            match next {
                Some(n) => q = n,
                None => break,
            }
        }
        self.tree.explore(q, teacher)?;
        if self.fold_broken() {
            return Ok(());
        }
        for _ in 0..=self.tree.depth(q) {
            let path = self.tree.path(q);
            let Some(&t) = path.iter().find(|n| !self.basis.contains(n)) else {
                return Ok(());
            };
            let Some((p, m)) = self.folds.get(&t).cloned() else {
                return Ok(());
            };
            self.log(|| format!("replaying counterexample suffix of t{t} at t{p}"));
            match self.tree.replay(&inverse(&m), t, q, p, teacher)? {
                ReplayOutcome::Done(end) => {
                    if self.fold_broken() {
                        return Ok(());
                    }
                    q = end;
                }
                _ => return Ok(()),
            }
        }
        Ok(())
    }

    /// Runs the learning loop against a teacher.
    pub fn run(&mut self, teacher: &mut Teacher) -> Result<LearnResult, LearnError> {
        let root = self.tree.root();
        self.tree.explore(root, teacher)?;
        let mut rounds = 0;
        loop {
            self.refine(teacher)?;
            let h = self.build_hypothesis()?;
            rounds += 1;
            let model = h.to_mmt();
            match teacher.eq(&model) {
                EquivResult::Equivalent => {
                    let stats = LearnStats::from_queries(
                        teacher.stats(),
                        teacher.elapsed_ms(),
                        rounds,
                        h.num_states(),
                    );
                    return Ok(LearnResult {
                        model,
                        hypothesis: h,
                        stats,
                        tree_size: self.tree.len(),
                    });
                }
                EquivResult::Counterexample(Counterexample { word, .. }) => {
                    self.log(|| format!("counterexample {word}"));
                    if rounds >= self.config.max_rounds {
                        return Err(LearnError::RoundLimit {
                            rounds,
                            stats: teacher.stats(),
                        });
                    }
                    self.process_counterexample(&word, teacher)?;
                }
            }
        }
    }
}
