//! Observation trees with timer apartness, run copying and replay.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write};

use crate::error::TreeError;
use crate::symbolic::{SymbolicAction, SymbolicWord};
use crate::teacher::Teacher;

/// A node of the tree. Node `t` also names the timer started on the edge into `t`.
pub type NodeId = usize;

/// A partial injective map from timers of one node to timers of another.
pub type Matching = BTreeMap<NodeId, NodeId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeAction {
    Input(usize),
    Timeout(NodeId),
}

/// The update on an edge. `Unknown` means no start has been observed yet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeUpdate {
    Unknown,
    Bot,
    Start(NodeId, u32),
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<(NodeId, TreeAction)>,
    output: usize,
    update: TreeUpdate,
    depth: usize,
    children: BTreeMap<TreeAction, NodeId>,
    active: BTreeSet<NodeId>,
    enabled: BTreeSet<NodeId>,
    explored: bool,
}

/// Why two nodes are apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ApartCase {
    Structural,
    Outputs,
    Constants,
    Sizes,
    Enabled,
}

impl fmt::Display for ApartCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ApartCase::Structural => "structural",
            ApartCase::Outputs => "outputs",
            ApartCase::Constants => "constants",
            ApartCase::Sizes => "sizes",
            ApartCase::Enabled => "enabled",
        };
        write!(f, "{s}")
    }
}

/// A run from the first node to `end`, its copy ending in `copy`, and the
/// case that separates them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Witness {
    pub end: NodeId,
    pub copy: NodeId,
    pub case: ApartCase,
}

/// The result of replaying a run at another node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayOutcome {
    /// The nodes became apart under the matching.
    Apart(Witness),
    /// The target node gained active timers.
    Active(Vec<NodeId>),
    /// The whole run was copied; the copy ends at the given node.
    Done(NodeId),
    /// Only a prefix could be copied and neither apartness nor new timers followed.
    Incomplete,
}

/// An observation tree over symbolic words.
#[derive(Clone, Debug)]
pub struct ObsTree {
    inputs: Vec<String>,
    outputs: Vec<String>,
    output_index: HashMap<String, usize>,
    nodes: Vec<Node>,
    revision: u64,
}

impl ObsTree {
    pub fn new(inputs: Vec<String>) -> Self {
        ObsTree {
            inputs,
            outputs: Vec::new(),
            output_index: HashMap::new(),
            nodes: vec![Node {
                parent: None,
                output: usize::MAX,
                update: TreeUpdate::Bot,
                depth: 0,
                children: BTreeMap::new(),
                active: BTreeSet::new(),
                enabled: BTreeSet::new(),
                explored: false,
            }],
            revision: 0,
        }
    }

    /// A counter that increases with every change to the tree.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|i| i == name)
    }

    fn check(&self, q: NodeId) -> Result<(), TreeError> {
        if q < self.nodes.len() {
            Ok(())
        } else {
            Err(TreeError::UnknownNode(q))
        }
    }

    pub fn parent(&self, q: NodeId) -> Option<(NodeId, TreeAction)> {
        self.nodes[q].parent
    }

    pub fn depth(&self, q: NodeId) -> usize {
        self.nodes[q].depth
    }

    pub fn output(&self, q: NodeId) -> Option<&str> {
        self.nodes[q]
            .parent
            .map(|_| self.outputs[self.nodes[q].output].as_str())
    }

    pub fn update(&self, q: NodeId) -> TreeUpdate {
        self.nodes[q].update
    }

    pub fn child(&self, q: NodeId, a: TreeAction) -> Option<NodeId> {
        self.nodes[q].children.get(&a).copied()
    }

    pub fn children(&self, q: NodeId) -> impl Iterator<Item = (TreeAction, NodeId)> + '_ {
        self.nodes[q].children.iter().map(|(a, c)| (*a, *c))
    }

    pub fn active(&self, q: NodeId) -> &BTreeSet<NodeId> {
        &self.nodes[q].active
    }

    pub fn enabled(&self, q: NodeId) -> &BTreeSet<NodeId> {
        &self.nodes[q].enabled
    }

    pub fn is_explored(&self, q: NodeId) -> bool {
        self.nodes[q].explored
    }

    pub fn action_name(&self, a: TreeAction) -> String {
        match a {
            TreeAction::Input(i) => self.inputs[i].clone(),
            TreeAction::Timeout(x) => format!("to[x{x}]"),
        }
    }

    /// Whether `a` is `b` or an ancestor of `b`.
    pub fn is_ancestor(&self, a: NodeId, mut b: NodeId) -> bool {
        let da = self.nodes[a].depth;
        while self.nodes[b].depth > da {
            b = self.nodes[b].parent.unwrap().0;
        }
        a == b
    }

    /// The nodes from the root to `q`, inclusive.
    pub fn path(&self, q: NodeId) -> Vec<NodeId> {
        let mut out = vec![q];
        let mut cur = q;
        while let Some((p, _)) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// The nodes strictly after `from` up to `to`, where `from` is an ancestor of `to`.
    pub fn run_nodes(&self, from: NodeId, to: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = to;
        while cur != from {
            out.push(cur);
            cur = self.nodes[cur].parent.expect("ancestor").0;
        }
        out.reverse();
        out
    }

    /// The actions of the run from `from` to `to`.
    pub fn run_actions(&self, from: NodeId, to: NodeId) -> Vec<TreeAction> {
        self.run_nodes(from, to)
            .into_iter()
            .map(|n| self.nodes[n].parent.unwrap().1)
            .collect()
    }

    /// The run from `from` to `to` written with action names.
    pub fn run_text(&self, from: NodeId, to: NodeId) -> String {
        let acts = self.run_actions(from, to);
        if acts.is_empty() {
            return "ε".into();
        }
        acts.iter()
            .map(|a| self.action_name(*a))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// The symbolic word leading from the root to `q`.
    pub fn symbolic_word(&self, q: NodeId) -> Result<SymbolicWord, TreeError> {
        let path = self.path(q);
        let mut word = SymbolicWord::new();
        for k in 1..path.len() {
            let (_, a) = self.nodes[path[k]].parent.unwrap();
            match a {
                TreeAction::Input(i) => word.push(SymbolicAction::Input(self.inputs[i].clone())),
                TreeAction::Timeout(x) => {
                    let cause = (1..k).rev().find_map(|j| match self.nodes[path[j]].update {
                        TreeUpdate::Start(y, c) if y == x => Some((c, j)),
                        _ => None,
                    });
                    let (constant, index) = cause.ok_or_else(|| {
                        TreeError::TeacherContract(format!("timeout of x{x} has no start"))
                    })?;
                    word.push(SymbolicAction::Timeout { constant, index });
                }
            }
        }
        Ok(word)
    }

    fn intern_output(&mut self, o: &str) -> usize {
        if let Some(&k) = self.output_index.get(o) {
            return k;
        }
        self.outputs.push(o.to_string());
        self.output_index
            .insert(o.to_string(), self.outputs.len() - 1);
        self.outputs.len() - 1
    }

    /// Adds a child without querying a teacher.
    pub fn add_child(
        &mut self,
        q: NodeId,
        a: TreeAction,
        output: &str,
        update: TreeUpdate,
    ) -> Result<NodeId, TreeError> {
        self.check(q)?;
        if self.nodes[q].children.contains_key(&a) {
            return Err(TreeError::EdgeExists {
                node: q,
                action: self.action_name(a),
            });
        }
        let output = self.intern_output(output);
        self.revision += 1;
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent: Some((q, a)),
            output,
            update,
            depth: self.nodes[q].depth + 1,
            children: BTreeMap::new(),
            active: BTreeSet::new(),
            enabled: BTreeSet::new(),
            explored: false,
        });
        self.nodes[q].children.insert(a, id);
        Ok(id)
    }

    /// Marks `q` explored; its enabled timers are those of its timeout children.
    pub fn mark_explored(&mut self, q: NodeId) {
        let en: BTreeSet<NodeId> = self.nodes[q]
            .children
            .keys()
            .filter_map(|a| match a {
                TreeAction::Timeout(x) => Some(*x),
                TreeAction::Input(_) => None,
            })
            .collect();
        self.nodes[q].enabled = en;
        self.nodes[q].explored = true;
        self.revision += 1;
    }

    /// Recomputes every active set from the timeout edges.
    pub fn recompute_active(&mut self) {
        self.revision += 1;
        for n in &mut self.nodes {
            n.active.clear();
        }
        for s in 0..self.nodes.len() {
            let tos: Vec<NodeId> = self.nodes[s]
                .children
                .keys()
                .filter_map(|a| match a {
                    TreeAction::Timeout(x) => Some(*x),
                    TreeAction::Input(_) => None,
                })
                .collect();
            for x in tos {
                let mut cur = s;
                loop {
                    self.nodes[cur].active.insert(x);
                    let started_here = cur == x
                        || matches!(self.nodes[cur].parent, Some((_, TreeAction::Timeout(y))) if y == x);
                    match self.nodes[cur].parent {
                        Some((p, _)) if !started_here => cur = p,
                        _ => break,
                    }
                }
            }
        }
    }

    /// Extends `q` by input `i` with an output query.
    pub fn extend_input(
        &mut self,
        q: NodeId,
        i: usize,
        teacher: &mut Teacher,
    ) -> Result<NodeId, TreeError> {
        self.check(q)?;
        let a = TreeAction::Input(i);
        if self.nodes[q].children.contains_key(&a) {
            return Err(TreeError::EdgeExists {
                node: q,
                action: self.action_name(a),
            });
        }
        let word = self
            .symbolic_word(q)?
            .with(SymbolicAction::Input(self.inputs[i].clone()));
        let outputs = teacher
            .oq(&word)
            .ok_or_else(|| TreeError::TeacherContract(format!("no run for `{word}`")))?;
        let out = outputs
            .last()
            .ok_or_else(|| TreeError::TeacherContract("empty output".into()))?
            .clone();
        self.add_child(q, a, &out, TreeUpdate::Unknown)
    }

    /// The child of `q` on input `i`, created on demand.
    pub fn input_child(
        &mut self,
        q: NodeId,
        i: usize,
        teacher: &mut Teacher,
    ) -> Result<NodeId, TreeError> {
        match self.child(q, TreeAction::Input(i)) {
            Some(c) => Ok(c),
            None => self.extend_input(q, i, teacher),
        }
    }

    /// Explores `q` with a wait query. Returns the `(node, timer)` pairs that
    /// became active.
    pub fn explore(
        &mut self,
        q: NodeId,
        teacher: &mut Teacher,
    ) -> Result<Vec<(NodeId, NodeId)>, TreeError> {
        self.check(q)?;
        if self.nodes[q].explored {
            return Ok(Vec::new());
        }
        if let Some((p, _)) = self.nodes[q].parent {
            if !self.nodes[p].explored {
                return Err(TreeError::ParentNotExplored(q));
            }
        }
        let word = self.symbolic_word(q)?;
        let answers = teacher
            .wq(&word)
            .ok_or_else(|| TreeError::TeacherContract(format!("no run for `{word}`")))?;
        let path = self.path(q);
        let mut grown = Vec::new();
        for ans in answers {
            let j = ans.index;
            if j == 0 || j >= path.len() {
                return Err(TreeError::TeacherContract(format!(
                    "timeout index {j} out of range after `{word}`"
                )));
            }
            let n = path[j];
            let x = match self.nodes[n].parent.unwrap().1 {
                TreeAction::Input(_) => n,
                TreeAction::Timeout(y) => y,
            };
            match self.nodes[n].update {
                TreeUpdate::Unknown => self.nodes[n].update = TreeUpdate::Start(x, ans.constant),
                TreeUpdate::Start(y, c) if y == x && c == ans.constant => {}
                other => return Err(TreeError::TeacherContract(format!(
                    "edge {j} of `{word}` has update {other:?}, but a start with {} was reported",
                    ans.constant
                ))),
            }
            let a = TreeAction::Timeout(x);
            match self.child(q, a) {
                Some(c) => {
                    if self.output(c) != Some(ans.output.as_str()) {
                        return Err(TreeError::TeacherContract(format!(
                            "inconsistent output for to[x{x}] after `{word}`"
                        )));
                    }
                }
                None => {
                    self.add_child(q, a, &ans.output, TreeUpdate::Unknown)?;
                }
            }
            self.nodes[q].enabled.insert(x);
            self.revision += 1;
            for &node in &path[j..] {
                if self.nodes[node].active.insert(x) {
                    grown.push((node, x));
                }
            }
        }
        self.nodes[q].explored = true;
        self.revision += 1;
        Ok(grown)
    }

    /// Whether timers `x` and `y` are both active in some node.
    pub fn timer_apart(&self, x: NodeId, y: NodeId) -> bool {
        if x == y {
            return false;
        }
        let deeper = if self.is_ancestor(x, y) {
            y
        } else if self.is_ancestor(y, x) {
            x
        } else {
            return false;
        };
        let act = &self.nodes[deeper].active;
        act.contains(&x) && act.contains(&y)
    }

    pub fn is_valid_matching(&self, m: &Matching) -> bool {
        m.iter().all(|(x, y)| !self.timer_apart(*x, *y))
    }

    /// The maximal matchings between the active timers of `p` and `r`.
    pub fn maximal_matchings(&self, p: NodeId, r: NodeId) -> Vec<Matching> {
        let a: Vec<NodeId> = self.active(p).iter().copied().collect();
        let b: Vec<NodeId> = self.active(r).iter().copied().collect();
        if a.len() <= b.len() {
            injections(&a, &b)
                .into_iter()
                .map(|img| a.iter().copied().zip(img).collect())
                .collect()
        } else {
            injections(&b, &a)
                .into_iter()
                .map(|img| img.into_iter().zip(b.iter().copied()).collect())
                .collect()
        }
    }

    /// Copies the run `p → d` to start at `r` under `m`. Returns the copied
    /// nodes and the matching extended with the fresh timers of the run.
    pub fn copy_run(
        &self,
        m: &Matching,
        p: NodeId,
        d: NodeId,
        r: NodeId,
    ) -> Option<(Vec<NodeId>, Matching)> {
        let mut ext = m.clone();
        let mut cur = r;
        let mut copied = Vec::new();
        for n in self.run_nodes(p, d) {
            let a = match self.nodes[n].parent.unwrap().1 {
                TreeAction::Input(i) => TreeAction::Input(i),
                TreeAction::Timeout(x) => TreeAction::Timeout(*ext.get(&x)?),
            };
            cur = self.child(cur, a)?;
            ext.insert(n, cur);
            copied.push(cur);
        }
        Some((copied, ext))
    }

    fn edge_cases(&self, n: NodeId, n2: NodeId) -> (bool, bool) {
        let outputs = self.nodes[n].output != self.nodes[n2].output;
        let constants = matches!(
            (self.nodes[n].update, self.nodes[n2].update),
            (TreeUpdate::Start(_, c1), TreeUpdate::Start(_, c2)) if c1 != c2
        );
        (outputs, constants)
    }

    fn state_cases(&self, d: NodeId, d2: NodeId, ext: &Matching) -> (bool, bool) {
        if !self.nodes[d].explored || !self.nodes[d2].explored {
            return (false, false);
        }
        let (e1, e2) = (&self.nodes[d].enabled, &self.nodes[d2].enabled);
        let sizes = e1.len() != e2.len();
        let enabled = ext.iter().any(|(x, y)| e1.contains(x) != e2.contains(y));
        (sizes, enabled)
    }

    /// The cases that hold for the specific run `p → d` under `m`.
    pub fn classify(&self, m: &Matching, p: NodeId, r: NodeId, d: NodeId) -> Vec<ApartCase> {
        let Some((copied, ext)) = self.copy_run(m, p, d, r) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        if !self.is_valid_matching(&ext) {
            out.push(ApartCase::Structural);
        }
        let d2 = copied.last().copied().unwrap_or(r);
        if d != p {
            let (o, c) = self.edge_cases(d, d2);
            if o {
                out.push(ApartCase::Outputs);
            }
            if c {
                out.push(ApartCase::Constants);
            }
        }
        let (s, e) = self.state_cases(d, d2, &ext);
        if s {
            out.push(ApartCase::Sizes);
        }
        if e {
            out.push(ApartCase::Enabled);
        }
        out
    }

    fn search(
        &self,
        m: &Matching,
        p: NodeId,
        r: NodeId,
        structural: bool,
        tier_one: bool,
    ) -> Option<Witness> {
        let mut queue: VecDeque<(NodeId, NodeId, Matching)> = VecDeque::new();
        if tier_one && structural && !self.is_valid_matching(m) {
            return Some(Witness {
                end: p,
                copy: r,
                case: ApartCase::Structural,
            });
        }
        queue.push_back((p, r, m.clone()));
        while let Some((d, d2, ext)) = queue.pop_front() {
            if !tier_one {
                let (s, e) = self.state_cases(d, d2, &ext);
                if s || e {
                    return Some(Witness {
                        end: d,
                        copy: d2,
                        case: if s {
                            ApartCase::Sizes
                        } else {
                            ApartCase::Enabled
                        },
                    });
                }
            }
            for (a, n) in self.children(d) {
                let a2 = match a {
                    TreeAction::Input(i) => TreeAction::Input(i),
                    TreeAction::Timeout(x) => match ext.get(&x) {
                        Some(&y) => TreeAction::Timeout(y),
                        None => continue,
                    },
                };
                let Some(n2) = self.child(d2, a2) else {
                    continue;
                };
                if tier_one {
                    let case = if structural && self.timer_apart(n, n2) {
                        Some(ApartCase::Structural)
                    } else {
                        match self.edge_cases(n, n2) {
                            (true, _) => Some(ApartCase::Outputs),
                            (_, true) => Some(ApartCase::Constants),
                            _ => None,
                        }
                    };
                    if let Some(case) = case {
                        return Some(Witness {
                            end: n,
                            copy: n2,
                            case,
                        });
                    }
                }
                let mut next = ext.clone();
                next.insert(n, n2);
                queue.push_back((n, n2, next));
            }
        }
        None
    }

    /// Searches for a witness that `p` and `r` are apart under `m`. Witnesses
    /// that do not depend on exploration (structural, outputs, constants) are
    /// preferred; within each group the shortest run wins.
    pub fn check_apart(&self, m: &Matching, p: NodeId, r: NodeId) -> Option<Witness> {
        self.search(m, p, r, true, true)
            .or_else(|| self.search(m, p, r, true, false))
    }

    /// Like [`ObsTree::check_apart`], ignoring structural witnesses.
    pub fn check_apart_behavioral(&self, m: &Matching, p: NodeId, r: NodeId) -> Option<Witness> {
        self.search(m, p, r, false, true)
            .or_else(|| self.search(m, p, r, false, false))
    }

    /// The shallowest node below `p` entered by a timeout of `x`.
    pub fn shortest_timeout(&self, p: NodeId, x: NodeId) -> Option<NodeId> {
        let mut queue = VecDeque::from([p]);
        while let Some(d) = queue.pop_front() {
            if let Some(c) = self.child(d, TreeAction::Timeout(x)) {
                return Some(c);
            }
            for (_, c) in self.children(d) {
                queue.push_back(c);
            }
        }
        None
    }

    /// Replays the run `p → d` at `r` under `m`, extending the tree with
    /// queries until the nodes become apart, `r` gains active timers, or the
    /// run has been copied.
    pub fn replay(
        &mut self,
        m: &Matching,
        p: NodeId,
        d: NodeId,
        r: NodeId,
        teacher: &mut Teacher,
    ) -> Result<ReplayOutcome, TreeError> {
        let run = self.run_nodes(p, d);
        let mut allowed: BTreeSet<NodeId> = m.keys().copied().collect();
        let mut copyable = 0;
        for &n in &run {
            if let TreeAction::Timeout(x) = self.nodes[n].parent.unwrap().1 {
                if !allowed.contains(&x) {
                    break;
                }
            }
            allowed.insert(n);
            copyable += 1;
        }
        let before: BTreeSet<NodeId> = self.active(r).clone();
        let grown = |t: &Self| -> Option<Vec<NodeId>> {
            let now = t.active(r);
            if now.len() > before.len() {
                Some(now.difference(&before).copied().collect())
            } else {
                None
            }
        };
        self.explore(r, teacher)?;
        if let Some(g) = grown(self) {
            return Ok(ReplayOutcome::Active(g));
        }
        if let Some(w) = self.check_apart(m, p, r) {
            return Ok(ReplayOutcome::Apart(w));
        }
        let mut ext = m.clone();
        let mut cur = r;
        for &n in &run[..copyable] {
            let a = match self.nodes[n].parent.unwrap().1 {
                TreeAction::Input(i) => TreeAction::Input(i),
                TreeAction::Timeout(x) => TreeAction::Timeout(ext[&x]),
            };
            let next = match (self.child(cur, a), a) {
                (Some(c), _) => c,
                (None, TreeAction::Input(i)) => self.extend_input(cur, i, teacher)?,
                (None, TreeAction::Timeout(_)) => {
                    return Ok(match self.check_apart(m, p, r) {
                        Some(w) => ReplayOutcome::Apart(w),
                        None => ReplayOutcome::Incomplete,
                    })
                }
            };
            ext.insert(n, next);
            self.explore(next, teacher)?;
            if let Some(g) = grown(self) {
                return Ok(ReplayOutcome::Active(g));
            }
            if let Some(w) = self.check_apart(m, p, r) {
                return Ok(ReplayOutcome::Apart(w));
            }
            cur = next;
        }
        if copyable == run.len() {
            Ok(ReplayOutcome::Done(cur))
        } else {
            Ok(ReplayOutcome::Incomplete)
        }
    }

    /// Renders the tree; nodes in `highlight` are filled.
    pub fn to_dot(&self, highlight: &BTreeSet<NodeId>) -> String {
        let mut out = String::from("digraph tree {\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let act: Vec<String> = n.active.iter().map(|x| format!("x{x}")).collect();
            let style = if highlight.contains(&id) {
                ", style=filled, fillcolor=lightgray"
            } else {
                ""
            };
            let shape = if n.explored { "box" } else { "ellipse" };
            let _ = writeln!(
                out,
                "  t{id} [shape={shape}, label=\"t{id}\\n{{{}}}\"{style}];",
                act.join(",")
            );
        }
        for (id, n) in self.nodes.iter().enumerate() {
            if let Some((p, a)) = n.parent {
                let upd = match n.update {
                    TreeUpdate::Unknown => String::new(),
                    TreeUpdate::Bot => ", ⊥".into(),
                    TreeUpdate::Start(x, c) => format!(", x{x}:={c}"),
                };
                let _ = writeln!(
                    out,
                    "  t{p} -> t{id} [label=\"{} / {}{}\"];",
                    self.action_name(a).replace('"', "\\\""),
                    self.outputs[n.output].replace('"', "\\\""),
                    upd
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// All injective maps from `a` into `b`, as image vectors in lexicographic order.
fn injections(a: &[NodeId], b: &[NodeId]) -> Vec<Vec<NodeId>> {
    fn go(
        k: usize,
        a: &[NodeId],
        b: &[NodeId],
        used: &mut Vec<bool>,
        cur: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        if k == a.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            cur.push(b[j]);
            go(k + 1, a, b, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
    let mut out = Vec::new();
    go(
        0,
        a,
        b,
        &mut vec![false; b.len()],
        &mut Vec::new(),
        &mut out,
    );
    out
}
