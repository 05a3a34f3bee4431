//! Graphviz export.

use std::fmt::Write;

use crate::gmmt::Gmmt;
use crate::mmt::{Mmt, Update};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders an MMT; states list their active timers.
pub fn mmt_to_dot(m: &Mmt) -> String {
    let mut out = String::from("digraph mmt {\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in m.states() {
        let active: Vec<&str> = m.active(q).iter().map(|x| m.timer_name(*x)).collect();
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\\n{{{}}}\"];",
            escape(m.state_name(q)),
            escape(m.state_name(q)),
            escape(&active.join(","))
        );
    }
    let _ = writeln!(
        out,
        "  __start -> \"{}\";",
        escape(m.state_name(m.initial()))
    );
    for q in m.states() {
        for (a, t) in m.transitions(q) {
            let upd = match t.update {
                Update::Bot => "⊥".to_string(),
                Update::Start(x, c) => format!("{}:={c}", m.timer_name(x)),
            };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{} / {}, {}\"];",
                escape(m.state_name(q)),
                escape(m.state_name(t.target)),
                escape(&m.action_name(a)),
                escape(m.output_name(t.output)),
                escape(&upd)
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Renders a generalized MMT.
pub fn gmmt_to_dot(g: &Gmmt) -> String {
    let mut out = String::from("digraph gmmt {\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in g.states() {
        let active: Vec<&str> = g.active(q).iter().map(|x| g.timer_name(*x)).collect();
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\\n{{{}}}\"];",
            escape(g.state_name(q)),
            escape(g.state_name(q)),
            escape(&active.join(","))
        );
    }
    let _ = writeln!(
        out,
        "  __start -> \"{}\";",
        escape(g.state_name(g.initial()))
    );
    for q in g.states() {
        for (a, t) in g.transitions(q) {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{} / {}, {}\"];",
                escape(g.state_name(q)),
                escape(g.state_name(t.target)),
                escape(&g.action_name(a)),
                escape(g.output_name(t.output)),
                escape(&g.update_name(&t.update))
            );
        }
    }
    out.push_str("}\n");
    out
}
